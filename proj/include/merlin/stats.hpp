#pragma once

#include <Eigen/Dense>

namespace merlin {

/// Orthonormal basis of the orthogonal complement of v, stacked as rows:
/// P has shape (d-1) x d with P * v = 0 and P * P^T = I.
struct Projector {
  Eigen::MatrixXd P;

  int d() const { return static_cast<int>(P.cols()); }
};

/// Inverse of the unbiased covariance of the centered columns (S, C, Y).
struct ThreeVarPrecision {
  Eigen::Matrix3d entries;
  int sampleCount = 0;
};

struct PartialCorrelations {
  double rhoSC_givenY = 0.0;
  double rhoSY_givenC = 0.0;
  double rhoCY_givenS = 0.0;
};

/// Deterministic construction via the Householder reflection mapping e1 to v;
/// the projector is rows 2..d of that reflection.
Projector projector(const Eigen::VectorXd& v);

/// Precision matrix of the three columns after mean subtraction, covariance
/// normalized by 1/(m-1). Throws SingularCovarianceError when the covariance
/// condition number exceeds 1e12 (or it is not positive definite).
ThreeVarPrecision empirical_precision(const Eigen::VectorXd& S, const Eigen::VectorXd& C,
                                      const Eigen::VectorXd& Y);

/// rho_{i,j|k} = -p_ij / sqrt(p_ii p_jj) for the three off-diagonal pairs.
PartialCorrelations partial_correlations(const ThreeVarPrecision& p);

namespace detail {

/// Centered data matrix together with its precision; shared between
/// empirical_precision and the objective gradients.
struct CenteredPrecision {
  Eigen::MatrixXd centered;  // m x 3
  Eigen::Matrix3d precision;
};

CenteredPrecision centered_precision(const Eigen::VectorXd& S, const Eigen::VectorXd& C,
                                     const Eigen::VectorXd& Y);

}  // namespace detail

}  // namespace merlin
