#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "merlin/random.hpp"

namespace merlin {

/// Objective callback: returns f(w) and, when grad is non-null, writes the
/// Euclidean gradient of f at w into *grad. Must be evaluable at any vector
/// near the unit sphere (line-search trial points are renormalized).
using SphereObjective = std::function<double(const Eigen::VectorXd& w, Eigen::VectorXd* grad)>;

struct OptConfig {
  int maxIters = 500;
  double minStepSize = 1e-10;  // arc length below which the line search gives up
  double minGradNorm = 1e-10;
  double armijoSlope = 1e-4;
  double backtrackFactor = 0.5;
  double initialStep = 1.0;  // arc length of the first line-search trial
  int restarts = 10;
  std::uint64_t seed = 0;
  bool keepTrace = false;

  void validate() const;
};

enum class Termination { GradNorm, StepSize, MaxIters };

std::string to_string(Termination t);

struct OptResult {
  Eigen::VectorXd wStar;
  double fStar = 0.0;
  int iterations = 0;
  Termination reason = Termination::MaxIters;
  int restartIndex = 0;
  /// Per-iteration (objective, tangent gradient norm), filled when
  /// cfg.keepTrace is set.
  std::vector<std::pair<double, double>> trace;
};

/// Riemannian steepest ascent with backtracking line search on the unit
/// sphere in R^dim. Per restart, the initial point is drawn uniformly from
/// the seeded stream mix_seed(cfg.seed, restartIndex); the best restart by
/// objective value wins (ties: lowest restart index).
///
/// A restart that hits a singular covariance is recorded and skipped; if
/// every restart fails that way the last error is rethrown. Non-finite
/// objective or gradient values throw NumericalError immediately.
OptResult maximize_on_sphere(const SphereObjective& f, int dim, const OptConfig& cfg);

/// Uniform draw from the unit sphere in R^dim (normalized standard normal).
Eigen::VectorXd uniform_sphere_sample(int dim, Rng& rng);

/// Max component deviation between the supplied Euclidean gradient and
/// central finite differences along the coordinate directions, relative to
/// the largest gradient component (floored at 1e-8). h must lie in
/// (1e-8, 1e-3).
double check_gradient(const SphereObjective& f, int dim, const Eigen::VectorXd& w, double h);

}  // namespace merlin
