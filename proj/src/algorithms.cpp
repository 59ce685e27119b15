#include "merlin/algorithms.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <utility>

#include "merlin/errors.hpp"
#include "merlin/stats.hpp"

namespace merlin {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Basic: return "basic";
    case Variant::Bp: return "bp";
    case Variant::BpPlus: return "bp+";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "basic") return Variant::Basic;
  if (name == "bp") return Variant::Bp;
  if (name == "bp+" || name == "bpplus") return Variant::BpPlus;
  throw std::invalid_argument("unknown variant '" + name + "' (use basic|bp|bp+)");
}

void ObjectiveConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
}

namespace {

struct Smoothed {
  double value;  // sqrt(x^2 + eps)
  double slope;  // x / value
};

Smoothed smooth_abs(double x, double eps) {
  const double v = std::sqrt(x * x + eps);
  return {v, x / v};
}

// Smoothed off-diagonal precision entries of (S, C, Y) and, on request, the
// pullback of each entry to the Y column: dP_ij/dY = -(P_i3 Xp_j + P_j3 Xp_i)/(m-1).
struct PrecisionContrast {
  double phi13 = 0.0, phi23 = 0.0;
  double slope13 = 0.0, slope23 = 0.0;
  Eigen::VectorXd d13, d23;
};

PrecisionContrast precision_contrast(const Eigen::VectorXd& S, const Eigen::VectorXd& C,
                                     const Eigen::VectorXd& Y, double epsilon, bool wantGrad) {
  const auto core = detail::centered_precision(S, C, Y);
  const Eigen::Matrix3d& P = core.precision;
  const double p13 = P(0, 2);
  const double p23 = P(1, 2);
  const double p33 = P(2, 2);
  const Smoothed s13 = smooth_abs(p13, epsilon);
  const Smoothed s23 = smooth_abs(p23, epsilon);

  PrecisionContrast out;
  out.phi13 = s13.value;
  out.phi23 = s23.value;
  out.slope13 = s13.slope;
  out.slope23 = s23.slope;
  if (wantGrad) {
    const double mm1 = static_cast<double>(S.size() - 1);
    const Eigen::VectorXd xp1 = core.centered * P.col(0);
    const Eigen::VectorXd xp2 = core.centered * P.col(1);
    const Eigen::VectorXd xp3 = core.centered * P.col(2);
    out.d13 = -(p13 * xp3 + p33 * xp1) / mm1;
    out.d23 = -(p23 * xp3 + p33 * xp2) / mm1;
  }
  return out;
}

}  // namespace

double objective_basic(const Eigen::VectorXd& w, const Eigen::VectorXd& S,
                       const Eigen::VectorXd& C, const Eigen::MatrixXd& Fproj,
                       const ObjectiveConfig& cfg, Eigen::VectorXd* grad) {
  cfg.validate();
  if (w.size() != Fproj.rows())
    throw std::invalid_argument("objective_basic: w does not match the projected mixture");
  const Eigen::VectorXd y = Fproj.transpose() * w;
  const PrecisionContrast pc = precision_contrast(S, C, y, cfg.epsilon, grad != nullptr);
  const double value = (1.0 - cfg.lambda) * pc.phi23 - cfg.lambda * pc.phi13;
  if (grad) {
    const Eigen::VectorXd gradY =
        (1.0 - cfg.lambda) * pc.slope23 * pc.d23 - cfg.lambda * pc.slope13 * pc.d13;
    *grad = Fproj * gradY;
  }
  return value;
}

namespace {

struct CombinedSpectra {
  Eigen::VectorXd A;  // Im parts after combining with w, flat (trial*n' + bin)
  Eigen::VectorXd B;  // Re parts
  Eigen::VectorXd D;  // per-trial log-bandpower
};

CombinedSpectra combine_spectra(const Eigen::VectorXd& w, const SpectralBundle& b) {
  if (w.size() != b.channels())
    throw std::invalid_argument("w does not match the projected channel count");
  CombinedSpectra out;
  out.A = b.FIm.transpose() * w;
  out.B = b.FRe.transpose() * w;
  const int m = b.trials();
  const int np = b.bins();
  const double n = static_cast<double>(b.nOriginal);
  out.D.resize(m);
  for (int t = 0; t < m; ++t) {
    double acc = 0.0;
    for (int k = 0; k < np; ++k) {
      const Eigen::Index idx = static_cast<Eigen::Index>(t) * np + k;
      const double modulus = std::hypot(out.A[idx], out.B[idx]) / n;
      if (modulus > 0.0) acc += std::log(modulus);  // log_*(0) = 0
    }
    out.D[t] = acc / np;
  }
  return out;
}

// Pullback of a per-trial sensitivity through the log-bandpower map, as
// per-entry coefficients on the Im/Re planes. Dead bins (zero modulus)
// contribute nothing.
void bandpower_chain(const CombinedSpectra& cs, const Eigen::VectorXd& gradD, int np,
                     Eigen::VectorXd& coefA, Eigen::VectorXd& coefB) {
  const Eigen::Index total = cs.A.size();
  coefA.setZero(total);
  coefB.setZero(total);
  for (Eigen::Index idx = 0; idx < total; ++idx) {
    const double r2 = cs.A[idx] * cs.A[idx] + cs.B[idx] * cs.B[idx];
    if (r2 > 0.0) {
      const int t = static_cast<int>(idx / np);
      const double c = gradD[t] / (np * r2);
      coefA[idx] = c * cs.A[idx];
      coefB[idx] = c * cs.B[idx];
    }
  }
}

}  // namespace

Eigen::VectorXd trial_log_bandpower(const Eigen::VectorXd& w, const SpectralBundle& bundle) {
  return combine_spectra(w, bundle).D;
}

Eigen::VectorXd v_log_bandpower(const SpectralBundle& bundle) {
  const int m = bundle.trials();
  Eigen::VectorXd c(m);
  for (int t = 0; t < m; ++t)
    c[t] = log_bandpower(bundle.VIm.row(t).transpose(), bundle.VRe.row(t).transpose(),
                         bundle.nOriginal);
  return c;
}

double objective_bp(const Eigen::VectorXd& w, const Eigen::VectorXd& S,
                    const Eigen::VectorXd& Cbp, const SpectralBundle& bundle,
                    const ObjectiveConfig& cfg, Eigen::VectorXd* grad) {
  cfg.validate();
  const CombinedSpectra cs = combine_spectra(w, bundle);
  const PrecisionContrast pc = precision_contrast(S, Cbp, cs.D, cfg.epsilon, grad != nullptr);
  const double value = (1.0 - cfg.lambda) * pc.phi23 - cfg.lambda * pc.phi13;
  if (grad) {
    const Eigen::VectorXd gradD =
        (1.0 - cfg.lambda) * pc.slope23 * pc.d23 - cfg.lambda * pc.slope13 * pc.d13;
    Eigen::VectorXd coefA, coefB;
    bandpower_chain(cs, gradD, bundle.bins(), coefA, coefB);
    *grad = bundle.FIm * coefA + bundle.FRe * coefB;
  }
  return value;
}

namespace {

struct IcohParts {
  Eigen::VectorXd icoh;      // per bin
  Eigen::VectorXd invDenom;  // 1 / sqrt(pv * pw)
  Eigen::VectorXd invPw;     // 1 / pw
};

IcohParts icoh_parts(const CombinedSpectra& cs, const SpectralBundle& b) {
  const int m = b.trials();
  const int np = b.bins();
  IcohParts out;
  out.icoh.resize(np);
  out.invDenom.resize(np);
  out.invPw.resize(np);
  for (int k = 0; k < np; ++k) {
    double num = 0.0, pv = 0.0, pw = 0.0;
    for (int t = 0; t < m; ++t) {
      const Eigen::Index idx = static_cast<Eigen::Index>(t) * np + k;
      num += b.VIm(t, k) * cs.B[idx] - b.VRe(t, k) * cs.A[idx];
      pv += b.VIm(t, k) * b.VIm(t, k) + b.VRe(t, k) * b.VRe(t, k);
      pw += cs.A[idx] * cs.A[idx] + cs.B[idx] * cs.B[idx];
    }
    num /= m;
    pv /= m;
    pw /= m;
    if (!(pv > 0.0) || !(pw > 0.0))
      throw NumericalError("imaginary coherency: zero band power at bin " +
                           std::to_string(b.binLo + k));
    out.invDenom[k] = 1.0 / std::sqrt(pv * pw);
    out.invPw[k] = 1.0 / pw;
    out.icoh[k] = num * out.invDenom[k];
  }
  return out;
}

}  // namespace

Eigen::VectorXd icoh_profile(const Eigen::VectorXd& w, const SpectralBundle& bundle) {
  const CombinedSpectra cs = combine_spectra(w, bundle);
  return icoh_parts(cs, bundle).icoh;
}

double objective_bpplus(const Eigen::VectorXd& w, const Eigen::VectorXd& S,
                        const Eigen::VectorXd& Cbp, const SpectralBundle& bundle,
                        const ObjectiveConfig& cfg, Eigen::VectorXd* grad) {
  cfg.validate();
  const CombinedSpectra cs = combine_spectra(w, bundle);
  const IcohParts ic = icoh_parts(cs, bundle);
  const Smoothed sT = smooth_abs(ic.icoh.sum(), cfg.epsilon);
  const PrecisionContrast pc = precision_contrast(S, Cbp, cs.D, cfg.epsilon, grad != nullptr);

  const double value = (1.0 - cfg.lambda) * sT.value * pc.phi23 - cfg.lambda * pc.phi13;
  if (grad) {
    const int m = bundle.trials();
    const int np = bundle.bins();

    // Precision path, with the dependence term carrying the icoh factor.
    const Eigen::VectorXd gradD = (1.0 - cfg.lambda) * sT.value * pc.slope23 * pc.d23 -
                                  cfg.lambda * pc.slope13 * pc.d13;
    Eigen::VectorXd coefA, coefB;
    bandpower_chain(cs, gradD, np, coefA, coefB);

    // Icoh path, folded into the same two GEMVs.
    const double cT = (1.0 - cfg.lambda) * sT.slope * pc.phi23;
    for (int k = 0; k < np; ++k) {
      const double invDen = ic.invDenom[k];
      const double ratio = ic.icoh[k] * ic.invPw[k];
      for (int t = 0; t < m; ++t) {
        const Eigen::Index idx = static_cast<Eigen::Index>(t) * np + k;
        coefA[idx] += cT * (-bundle.VRe(t, k) * invDen - ratio * cs.A[idx]) / m;
        coefB[idx] += cT * (bundle.VIm(t, k) * invDen - ratio * cs.B[idx]) / m;
      }
    }
    *grad = bundle.FIm * coefA + bundle.FRe * coefB;
  }
  return value;
}

namespace {

MerlinResult optimize_and_map(const SphereObjective& objective, const Projector& proj, int dim,
                              const OptConfig& opt, Variant variant) {
  OptResult best;
  if (dim == 1) {
    // O^0 = {+1, -1}: evaluate both candidates exhaustively.
    Eigen::VectorXd plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    const double fplus = objective(plus, nullptr);
    const double fminus = objective(minus, nullptr);
    best.wStar = (fminus > fplus) ? minus : plus;
    best.fStar = std::max(fplus, fminus);
    best.iterations = 0;
    best.reason = Termination::GradNorm;  // tangent space of O^0 is trivial
    best.restartIndex = 0;
  } else {
    best = maximize_on_sphere(objective, dim, opt);
  }

  MerlinResult result;
  result.variant = variant;
  result.w = (proj.P.transpose() * best.wStar).normalized();
  result.objective = best.fStar;
  result.diagnostics = std::move(best);
  return result;
}

}  // namespace

MerlinResult merlin_basic(const Dataset2D& ds, const ObjectiveConfig& cfg, const OptConfig& opt) {
  ds.validate();
  cfg.validate();
  opt.validate();
  if (ds.d() > ds.m())
    throw std::invalid_argument("merlin basic requires d <= m (got d=" + std::to_string(ds.d()) +
                                ", m=" + std::to_string(ds.m()) + ")");
  const Projector proj = projector(ds.v);
  const Eigen::VectorXd c = ds.F.transpose() * ds.v;
  const Eigen::MatrixXd fproj = proj.P * ds.F;
  const SphereObjective objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    return objective_basic(w, ds.S, c, fproj, cfg, grad);
  };
  return optimize_and_map(objective, proj, ds.d() - 1, opt, Variant::Basic);
}

namespace {

MerlinResult merlin_timeseries(const Dataset3D& ds, const BandSpec& band,
                               const ObjectiveConfig& cfg, const OptConfig& opt,
                               Variant variant) {
  ds.validate();
  cfg.validate();
  opt.validate();
  if (ds.d() - 1 > ds.m())
    std::cerr << "warning: d-1 > m (" << ds.d() - 1 << " > " << ds.m()
              << "); recovery is underdetermined\n";
  const SpectralBundle bundle = preprocess(ds, band);
  const Eigen::VectorXd cbp = v_log_bandpower(bundle);
  const Projector proj = projector(ds.v);
  const SphereObjective objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    return variant == Variant::Bp ? objective_bp(w, ds.S, cbp, bundle, cfg, grad)
                                  : objective_bpplus(w, ds.S, cbp, bundle, cfg, grad);
  };
  return optimize_and_map(objective, proj, ds.d() - 1, opt, variant);
}

}  // namespace

MerlinResult merlin_bp(const Dataset3D& ds, const BandSpec& band, const ObjectiveConfig& cfg,
                       const OptConfig& opt) {
  return merlin_timeseries(ds, band, cfg, opt, Variant::Bp);
}

MerlinResult merlin_bpplus(const Dataset3D& ds, const BandSpec& band, const ObjectiveConfig& cfg,
                           const OptConfig& opt) {
  return merlin_timeseries(ds, band, cfg, opt, Variant::BpPlus);
}

}  // namespace merlin
