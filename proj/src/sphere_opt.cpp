#include "merlin/sphere_opt.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "merlin/errors.hpp"

namespace merlin {

void OptConfig::validate() const {
  if (maxIters < 1) throw std::invalid_argument("maxIters must be >= 1");
  if (!(backtrackFactor > 0.0 && backtrackFactor < 1.0))
    throw std::invalid_argument("backtrackFactor must lie in (0, 1)");
  if (!(armijoSlope > 0.0 && armijoSlope < 1.0))
    throw std::invalid_argument("armijoSlope must lie in (0, 1)");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(minStepSize > 0.0) || !(minGradNorm >= 0.0) || !(initialStep > 0.0))
    throw std::invalid_argument("step and gradient thresholds must be positive");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradNorm: return "gradNorm";
    case Termination::StepSize: return "stepSize";
    case Termination::MaxIters: return "maxIters";
  }
  return "unknown";
}

Eigen::VectorXd uniform_sphere_sample(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("uniform_sphere_sample requires dim >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) x[i] = normal(rng);
    norm = x.norm();
  } while (!(norm > 0.0));
  return x / norm;
}

namespace {

double evaluate(const SphereObjective& f, const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
  const double value = f(w, grad);
  if (!std::isfinite(value)) throw NumericalError("objective evaluated to a non-finite value");
  if (grad && !grad->allFinite()) throw NumericalError("gradient evaluated to non-finite values");
  return value;
}

OptResult single_restart(const SphereObjective& f, int dim, const OptConfig& cfg,
                         int restartIndex) {
  Rng rng = make_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restartIndex)));
  OptResult res;
  res.restartIndex = restartIndex;

  Eigen::VectorXd w = uniform_sphere_sample(dim, rng);
  Eigen::VectorXd grad(dim);
  double fcur = evaluate(f, w, &grad);

  for (int iter = 1; iter <= cfg.maxIters; ++iter) {
    Eigen::VectorXd tangent = grad - grad.dot(w) * w;
    const double gradNorm2 = tangent.squaredNorm();
    const double gradNorm = std::sqrt(gradNorm2);
    if (cfg.keepTrace) res.trace.emplace_back(fcur, gradNorm);
    if (gradNorm < cfg.minGradNorm) {
      res.iterations = iter - 1;
      res.reason = Termination::GradNorm;
      res.wStar = w;
      res.fStar = fcur;
      return res;
    }

    // Backtrack along the fixed tangent direction; retract by renormalizing.
    // The first trial moves initialStep in arc length (the step scale is
    // 1/gradNorm), and minStepSize bounds the arc length of accepted steps.
    double step = cfg.initialStep / gradNorm;
    bool accepted = false;
    while (step * gradNorm >= cfg.minStepSize) {
      Eigen::VectorXd trial = (w + step * tangent).normalized();
      const double ftrial = evaluate(f, trial, nullptr);
      if (ftrial >= fcur + cfg.armijoSlope * step * gradNorm2) {
        w = std::move(trial);
        fcur = ftrial;
        accepted = true;
        break;
      }
      step *= cfg.backtrackFactor;
    }
    if (!accepted) {
      res.iterations = iter;
      res.reason = Termination::StepSize;
      res.wStar = w;
      res.fStar = fcur;
      return res;
    }
    evaluate(f, w, &grad);
  }

  res.iterations = cfg.maxIters;
  res.reason = Termination::MaxIters;
  res.wStar = w;
  res.fStar = fcur;
  return res;
}

}  // namespace

OptResult maximize_on_sphere(const SphereObjective& f, int dim, const OptConfig& cfg) {
  cfg.validate();
  if (dim < 2) throw std::invalid_argument("maximize_on_sphere requires dim >= 2");

  std::optional<OptResult> best;
  std::optional<SingularCovarianceError> lastFailure;
  for (int r = 0; r < cfg.restarts; ++r) {
    try {
      OptResult candidate = single_restart(f, dim, cfg, r);
      if (!best || candidate.fStar > best->fStar) best = std::move(candidate);
    } catch (const SingularCovarianceError& e) {
      lastFailure = e;
    }
  }
  if (!best) {
    if (lastFailure) throw SingularCovarianceError(std::string(lastFailure->what()) +
                                                   " (at every restart)");
    throw NumericalError("all restarts failed");
  }
  return *best;
}

double check_gradient(const SphereObjective& f, int dim, const Eigen::VectorXd& w, double h) {
  if (w.size() != dim) throw std::invalid_argument("check_gradient: dimension mismatch");
  if (std::abs(w.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("check_gradient requires a unit vector");
  if (!(h > 1e-8 && h < 1e-3))
    throw std::invalid_argument("check_gradient requires h in (1e-8, 1e-3)");

  Eigen::VectorXd analytic(dim);
  evaluate(f, w, &analytic);

  Eigen::VectorXd fd(dim);
  Eigen::VectorXd probe = w;
  for (int k = 0; k < dim; ++k) {
    probe[k] = w[k] + h;
    const double fp = evaluate(f, probe, nullptr);
    probe[k] = w[k] - h;
    const double fm = evaluate(f, probe, nullptr);
    probe[k] = w[k];
    fd[k] = (fp - fm) / (2.0 * h);
  }
  // Component errors are judged against the gradient's magnitude; per-entry
  // ratios on components ~1e5x below it would only measure float64 noise in
  // the difference quotient.
  const double scale =
      std::max({analytic.cwiseAbs().maxCoeff(), fd.cwiseAbs().maxCoeff(), 1e-8});
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

}  // namespace merlin
