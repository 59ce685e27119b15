"""Recovery of linear causal effects from observed mixtures.

Thin wrapper around the compiled extension; see the package README for the
algorithmic background and the command-line interface.
"""

from ._core import (
    BandSpec,
    Dataset2D,
    Dataset3D,
    MerlinResult,
    NumericalError,
    ObjectiveConfig,
    OptConfig,
    OptResult,
    SingularCovarianceError,
    SpectralBundle,
    activation_pattern,
    andi,
    band_bins,
    empirical_precision,
    gen_dataset,
    gen_timeseries_dataset,
    icoh_profile,
    load_bundle,
    merlin_basic,
    merlin_bp,
    merlin_bpplus,
    partial_correlations,
    pobv,
    preprocess,
    projector,
    reg_inc_beta,
    save_bundle,
    self_check,
    trial_log_bandpower,
    v_log_bandpower,
)

__all__ = [
    "BandSpec",
    "Dataset2D",
    "Dataset3D",
    "MerlinResult",
    "NumericalError",
    "ObjectiveConfig",
    "OptConfig",
    "OptResult",
    "SingularCovarianceError",
    "SpectralBundle",
    "activation_pattern",
    "andi",
    "band_bins",
    "empirical_precision",
    "gen_dataset",
    "gen_timeseries_dataset",
    "icoh_profile",
    "load_bundle",
    "merlin_basic",
    "merlin_bp",
    "merlin_bpplus",
    "partial_correlations",
    "pobv",
    "preprocess",
    "projector",
    "reg_inc_beta",
    "save_bundle",
    "self_check",
    "trial_log_bandpower",
    "v_log_bandpower",
]

__version__ = "0.1.0"
