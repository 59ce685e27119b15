#include "merlin/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "merlin/errors.hpp"

namespace merlin {

Projector projector(const Eigen::VectorXd& v) {
  const Eigen::Index d = v.size();
  if (d < 2) throw std::invalid_argument("projector requires d >= 2");
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("projector requires a unit vector");

  // Householder reflection H with H e1 = v (and H v = e1); the complement
  // basis is rows 2..d of H. If v == e1 the reflection degenerates to I.
  Eigen::VectorXd u = v;
  u[0] -= 1.0;
  const double uu = u.squaredNorm();
  Projector result;
  result.P.resize(d - 1, d);
  if (uu == 0.0) {
    result.P.setZero();
    for (Eigen::Index r = 0; r < d - 1; ++r) result.P(r, r + 1) = 1.0;
    return result;
  }
  const double scale = 2.0 / uu;
  for (Eigen::Index r = 0; r < d - 1; ++r) {
    result.P.row(r) = -scale * u[r + 1] * u.transpose();
    result.P(r, r + 1) += 1.0;
  }
  return result;
}

namespace detail {

CenteredPrecision centered_precision(const Eigen::VectorXd& S, const Eigen::VectorXd& C,
                                     const Eigen::VectorXd& Y) {
  const Eigen::Index m = S.size();
  if (C.size() != m || Y.size() != m)
    throw std::invalid_argument("precision: column lengths differ");
  if (m < 4) throw std::invalid_argument("precision requires m >= 4");

  CenteredPrecision out;
  out.centered.resize(m, 3);
  out.centered.col(0) = S.array() - S.mean();
  out.centered.col(1) = C.array() - C.mean();
  out.centered.col(2) = Y.array() - Y.mean();

  const Eigen::Matrix3d cov =
      out.centered.transpose() * out.centered / static_cast<double>(m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d ev = eig.eigenvalues();
  const double lmin = ev.minCoeff();
  const double lmax = ev.maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > 1e12)
    throw SingularCovarianceError(
        "singular or near-singular covariance (condition number " +
        std::to_string(lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity()) + ")");
  out.precision =
      eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  // The eigendecomposition route is symmetric up to rounding; make it exact.
  out.precision = ((out.precision + out.precision.transpose()) / 2.0).eval();
  return out;
}

}  // namespace detail

ThreeVarPrecision empirical_precision(const Eigen::VectorXd& S, const Eigen::VectorXd& C,
                                      const Eigen::VectorXd& Y) {
  ThreeVarPrecision p;
  p.entries = detail::centered_precision(S, C, Y).precision;
  p.sampleCount = static_cast<int>(S.size());
  return p;
}

PartialCorrelations partial_correlations(const ThreeVarPrecision& p) {
  const Eigen::Matrix3d& q = p.entries;
  for (int i = 0; i < 3; ++i)
    if (!(q(i, i) > 0.0))
      throw std::invalid_argument("partial correlations require a positive precision diagonal");
  auto rho = [&](int i, int j) {
    const double r = -q(i, j) / std::sqrt(q(i, i) * q(j, j));
    return std::clamp(r, -1.0, 1.0);
  };
  return PartialCorrelations{rho(0, 1), rho(0, 2), rho(1, 2)};
}

}  // namespace merlin
