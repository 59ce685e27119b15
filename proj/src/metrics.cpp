#include "merlin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "merlin/errors.hpp"

namespace merlin {

namespace {

double clamped_abs_dot(const Eigen::VectorXd& w, const Eigen::VectorXd& wG0) {
  if (w.size() != wG0.size()) throw std::invalid_argument("metric: dimension mismatch");
  if (w.size() < 2) throw std::invalid_argument("metric requires dimension >= 2");
  return std::clamp(std::abs(w.dot(wG0)), 0.0, 1.0);
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b),
// Numerical Recipes style; converges inside x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
  constexpr int maxIter = 300;
  constexpr double eps = 1e-12;
  constexpr double fpmin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= maxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double x, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("reg_inc_beta requires alpha, beta > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("reg_inc_beta requires x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(alpha + beta) - std::lgamma(alpha) -
                                std::lgamma(beta) + alpha * std::log(x) +
                                beta * std::log1p(-x));
  if (x < (alpha + 1.0) / (alpha + beta + 2.0))
    return front * beta_cf(alpha, beta, x) / alpha;
  return 1.0 - front * beta_cf(beta, alpha, 1.0 - x) / beta;
}

double andi(const Eigen::VectorXd& w, const Eigen::VectorXd& wG0) {
  return std::acos(clamped_abs_dot(w, wG0));
}

double pobv(const Eigen::VectorXd& w, const Eigen::VectorXd& wG0) {
  const double dim = static_cast<double>(w.size());
  const double h = 1.0 - clamped_abs_dot(w, wG0);
  const double x = std::clamp(h * (2.0 - h), 0.0, 1.0);
  return reg_inc_beta(x, (dim - 1.0) / 2.0, 0.5);
}

MetricReport metric_report(const Eigen::VectorXd& w, const Eigen::VectorXd& wG0) {
  MetricReport r;
  r.andi = andi(w, wG0);
  r.pobv = pobv(w, wG0);
  r.capHeight = 1.0 - clamped_abs_dot(w, wG0);
  return r;
}

Eigen::VectorXd activation_pattern(const Eigen::VectorXd& w, const Eigen::MatrixXd& Sigma) {
  if (Sigma.rows() != Sigma.cols() || Sigma.rows() != w.size())
    throw std::invalid_argument("activation_pattern: dimension mismatch");
  const double scale = std::max(1.0, Sigma.cwiseAbs().maxCoeff());
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("activation_pattern requires a symmetric covariance");
  Eigen::VectorXd pattern = Sigma * w;
  const double norm = pattern.norm();
  if (!(norm > 0.0)) throw NumericalError("activation pattern is the zero vector");
  return pattern / norm;
}

}  // namespace merlin
