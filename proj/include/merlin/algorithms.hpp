#pragma once

#include <Eigen/Dense>

#include <string>

#include "merlin/dataset.hpp"
#include "merlin/spectral.hpp"
#include "merlin/sphere_opt.hpp"

namespace merlin {

enum class Variant { Basic, Bp, BpPlus };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

/// epsilon smooths |x| as sqrt(x^2 + epsilon). lambda in [0, 1] weighs the
/// dependence term against the conditional-independence term,
///   f = (1 - lambda) |p23| - lambda |p13|;
/// lambda = 0.5 (the default) is exactly half the unweighted objective and
/// therefore has the same maximizers.
struct ObjectiveConfig {
  double epsilon = 1e-12;
  double lambda = 0.5;

  void validate() const;
};

struct MerlinResult {
  Eigen::VectorXd w;       // unit vector in the original d-dim channel space
  double objective = 0.0;  // value at the optimum, on the lambda scale
  OptResult diagnostics;
  Variant variant = Variant::Basic;
};

/// Objective of the static algorithm: the smoothed precision-entry contrast
/// of (S, C, Fproj^T w). w lives in R^(d-1); Fproj is the projected mixture.
/// Writes the analytic Euclidean gradient when grad is non-null.
double objective_basic(const Eigen::VectorXd& w, const Eigen::VectorXd& S,
                       const Eigen::VectorXd& C, const Eigen::MatrixXd& Fproj,
                       const ObjectiveConfig& cfg, Eigen::VectorXd* grad = nullptr);

/// Per-trial log-bandpower of the w-combined projected spectra.
Eigen::VectorXd trial_log_bandpower(const Eigen::VectorXd& w, const SpectralBundle& bundle);

/// Per-trial log-bandpower of the v-signal spectra (the "C" column of the
/// timeseries algorithms).
Eigen::VectorXd v_log_bandpower(const SpectralBundle& bundle);

/// Bandpower objective: precision-entry contrast of (S, Cbp, D_w) where D_w
/// is the per-trial log-bandpower after combining with w.
double objective_bp(const Eigen::VectorXd& w, const Eigen::VectorXd& S,
                    const Eigen::VectorXd& Cbp, const SpectralBundle& bundle,
                    const ObjectiveConfig& cfg, Eigen::VectorXd* grad = nullptr);

/// Per-bin imaginary coherency between the v-signal and the w-combined
/// signal, trial-averaged. Throws NumericalError on a zero denominator
/// (all-zero v or w band power at some bin).
Eigen::VectorXd icoh_profile(const Eigen::VectorXd& w, const SpectralBundle& bundle);

/// Time-lag aware variant: the dependence term is multiplied by the smoothed
/// absolute sum of icoh over bins.
double objective_bpplus(const Eigen::VectorXd& w, const Eigen::VectorXd& S,
                        const Eigen::VectorXd& Cbp, const SpectralBundle& bundle,
                        const ObjectiveConfig& cfg, Eigen::VectorXd* grad = nullptr);

/// End-to-end static algorithm: C = F^T v, project F onto v's orthogonal
/// complement, maximize objective_basic over the sphere, map back through the
/// projector. Requires d <= m.
MerlinResult merlin_basic(const Dataset2D& ds, const ObjectiveConfig& cfg, const OptConfig& opt);

/// Timeseries algorithms: preprocess into band spectra, build the per-trial
/// log-bandpower column, maximize the respective objective, map back.
MerlinResult merlin_bp(const Dataset3D& ds, const BandSpec& band, const ObjectiveConfig& cfg,
                       const OptConfig& opt);
MerlinResult merlin_bpplus(const Dataset3D& ds, const BandSpec& band, const ObjectiveConfig& cfg,
                           const OptConfig& opt);

}  // namespace merlin
