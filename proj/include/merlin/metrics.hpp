#pragma once

#include <Eigen/Dense>

namespace merlin {

struct MetricReport {
  double andi = 0.0;       // radians in [0, pi/2]
  double pobv = 0.0;       // probability in [0, 1]
  double capHeight = 0.0;  // h = 1 - |w . wG0|
};

/// Angular distance modulo sign: arccos(|w . wG0|) in [0, pi/2].
double andi(const Eigen::VectorXd& w, const Eigen::VectorXd& wG0);

/// Regularized incomplete beta function I_x(alpha, beta), continued-fraction
/// evaluation, absolute error below 1e-10.
double reg_inc_beta(double x, double alpha, double beta);

/// Probability that a uniformly random unit vector lands closer to wG0 than
/// w does: I_{h(2-h)}((d-1)/2, 1/2) with h = 1 - |w . wG0|.
double pobv(const Eigen::VectorXd& w, const Eigen::VectorXd& wG0);

MetricReport metric_report(const Eigen::VectorXd& w, const Eigen::VectorXd& wG0);

/// Channel-space activation pattern Sigma * w, normalized to unit length.
Eigen::VectorXd activation_pattern(const Eigen::VectorXd& w, const Eigen::MatrixXd& Sigma);

}  // namespace merlin
