"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import merlin


def test_basic_recovery_roundtrip():
    ds = merlin.gen_dataset(d=5, m=2000, a=0.1, b=0.0, kind="G", seed=1)
    assert ds.d == 5
    assert ds.m == 2000
    assert ds.wG0 is not None

    opt = merlin.OptConfig()
    opt.seed = 2
    opt.restarts = 5
    result = merlin.merlin_basic(ds, merlin.ObjectiveConfig(), opt)
    assert abs(np.linalg.norm(result.w) - 1.0) < 1e-10
    assert abs(float(np.dot(result.w, ds.v))) < 1e-10
    assert merlin.andi(result.w, ds.wG0) < 0.1
    assert result.variant == "basic"
    assert result.diagnostics.termination in {"gradNorm", "stepSize", "maxIters"}


def test_metrics_closed_forms():
    w = np.array([0.5, math.sqrt(0.75), 0.0])
    truth = np.array([1.0, 0.0, 0.0])
    assert merlin.pobv(w, truth) == pytest.approx(0.5, abs=1e-9)
    assert merlin.andi(truth, -truth) == 0.0
    assert merlin.reg_inc_beta(0.75, 1.0, 0.5) == pytest.approx(0.5, abs=1e-10)


def test_band_bins_arithmetic():
    assert merlin.band_bins(250.0, 15000, merlin.BandSpec(55.0, 85.0)) == (3300, 5100, 1801)


def test_timeseries_pipeline():
    band = merlin.BandSpec(8.0, 24.0)
    ds = merlin.gen_timeseries_dataset(
        d=5, m=40, a=0.5, b=0.0, kind="G", seed=3, n=64, fs=64.0, band=band, carrier_seed=4
    )
    assert ds.tensor.shape == (5, 40, 64)

    bundle = merlin.preprocess(ds, band)
    assert bundle.trials == 40
    assert bundle.bins == 17

    opt = merlin.OptConfig()
    opt.seed = 5
    opt.restarts = 3
    result = merlin.merlin_bp(ds, band, merlin.ObjectiveConfig(), opt)
    assert merlin.andi(result.w, ds.wG0) < 0.5


def test_bundle_io(tmp_path):
    ds = merlin.gen_dataset(d=5, m=50, a=1.0, b=0.5, kind="B", seed=6)
    merlin.save_bundle(ds, tmp_path / "bundle")
    loaded = merlin.load_bundle(tmp_path / "bundle")
    np.testing.assert_array_equal(loaded.F, ds.F)
    np.testing.assert_array_equal(loaded.S, ds.S)


def test_precision_and_projector():
    rng = np.random.default_rng(7)
    s = rng.normal(size=5000)
    c = s + rng.normal(size=5000)
    y = c + rng.normal(size=5000)
    precision = merlin.empirical_precision(s, c, y)
    assert precision.shape == (3, 3)
    assert abs(precision[0, 2]) < 0.1  # S and Y screened off by C

    _, rho_sy_given_c, _ = merlin.partial_correlations(s, c, y)
    assert abs(rho_sy_given_c) < 0.05

    v = np.array([1.0, 1.0]) / math.sqrt(2.0)
    p = merlin.projector(v)
    assert p.shape == (1, 2)
    assert abs(float(p @ v)) < 1e-12


def test_singularity_is_a_python_exception():
    rng = np.random.default_rng(8)
    s = rng.normal(size=100)
    c = rng.normal(size=100)
    with pytest.raises(merlin.SingularCovarianceError):
        merlin.empirical_precision(s, c, 2.0 * c + 1.0)
