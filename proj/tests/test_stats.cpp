#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "merlin/errors.hpp"
#include "merlin/random.hpp"
#include "merlin/sphere_opt.hpp"
#include "merlin/stats.hpp"
#include "support.hpp"

using namespace merlin;

namespace {

Eigen::VectorXd randn(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = normal(rng);
  return x;
}

}  // namespace

TEST_CASE("projector of e1 is the remaining axes") {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
  v[0] = 1.0;
  const Projector p = projector(v);
  REQUIRE(p.P.rows() == 2);
  CHECK(p.P(0, 1) == 1.0);
  CHECK(p.P(1, 2) == 1.0);
  CHECK(p.P.cwiseAbs().sum() == doctest::Approx(2.0));
}

TEST_CASE("projector rows are an orthonormal basis of the complement") {
  Rng rng = make_rng(21);
  for (int d : {2, 3, 7, 40}) {
    const Eigen::VectorXd v = uniform_sphere_sample(d, rng);
    const Projector p = projector(v);
    CHECK((p.P * v).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd gram = p.P * p.P.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(d - 1, d - 1)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("projector for (1,1)/sqrt(2) is the hand-solved row") {
  Eigen::VectorXd v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Projector p = projector(v);
  REQUIRE(p.P.rows() == 1);
  // Orthogonality in 2d forces the row to be +-(1,-1)/sqrt(2).
  const double a = p.P(0, 0);
  const double b = p.P(0, 1);
  CHECK(std::abs(a) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(a == doctest::Approx(-b).epsilon(1e-12));
}

TEST_CASE("projector rejects bad input") {
  CHECK_THROWS_AS(projector(Eigen::VectorXd::Ones(1)), std::invalid_argument);
  CHECK_THROWS_AS(projector(Eigen::VectorXd::Ones(3)), std::invalid_argument);  // not unit
}

TEST_CASE("independent unit-variance columns give an identity precision") {
  Rng rng = make_rng(23);
  const int m = 100000;
  const ThreeVarPrecision p = empirical_precision(randn(m, rng), randn(m, rng), randn(m, rng));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(p.entries(i, j) == doctest::Approx(1.0).epsilon(0.02));
      else
        CHECK(std::abs(p.entries(i, j)) < 0.02);
    }
  CHECK(p.sampleCount == m);
}

TEST_CASE("affine dependence raises the singularity error") {
  Rng rng = make_rng(25);
  const Eigen::VectorXd s = randn(50, rng);
  const Eigen::VectorXd c = randn(50, rng);
  const Eigen::VectorXd y = 2.0 * c.array() + 7.0;
  CHECK_THROWS_AS(empirical_precision(s, c, y), SingularCovarianceError);
}

TEST_CASE("chain SEM zeroes the stimulus-effect precision entry") {
  // S -> C -> Y with unit coefficients and unit noise: population precision
  // is [[2,-1,0],[-1,2,-1],[0,-1,1]], so the (1,3) entry estimates zero with
  // asymptotic standard error sqrt((P11 P33 + P13^2)/m) = sqrt(2/m).
  Rng rng = make_rng(27);
  const int m = 100000;
  const Eigen::VectorXd s = randn(m, rng);
  const Eigen::VectorXd c = s + randn(m, rng);
  const Eigen::VectorXd y = c + randn(m, rng);
  const ThreeVarPrecision p = empirical_precision(s, c, y);
  CHECK(std::abs(p.entries(0, 2)) < 3.0 * std::sqrt(2.0 / m));
  CHECK(p.entries(1, 2) < -0.5);  // rho_{C,Y|S} stays bounded away from zero

  const PartialCorrelations rho = partial_correlations(p);
  CHECK(std::abs(rho.rhoSY_givenC) < 0.02);
  CHECK(std::abs(rho.rhoCY_givenS) > 0.3);
}

TEST_CASE("precision is invariant under adding constants to columns") {
  Rng rng = make_rng(29);
  const int m = 500;
  const Eigen::VectorXd s = randn(m, rng);
  const Eigen::VectorXd c = randn(m, rng);
  const Eigen::VectorXd y = (0.5 * s + c + randn(m, rng)) / 2.0;
  const ThreeVarPrecision base = empirical_precision(s, c, y);
  const ThreeVarPrecision shifted = empirical_precision(
      s.array() + 5.0, c.array() - 3.0, y.array() + 100.0);
  CHECK((base.entries - shifted.entries).cwiseAbs().maxCoeff() <
        1e-8 * base.entries.cwiseAbs().maxCoeff());
}

TEST_CASE("partial correlations from the precision match the recursive formula") {
  Rng rng = make_rng(31);
  const int m = 2000;
  const Eigen::VectorXd s = randn(m, rng);
  const Eigen::VectorXd c = (s + randn(m, rng)) * 0.8;
  const Eigen::VectorXd y = 0.3 * s + 0.6 * c + randn(m, rng);
  const PartialCorrelations rho = partial_correlations(empirical_precision(s, c, y));
  CHECK(rho.rhoSC_givenY ==
        doctest::Approx(testsup::partial_corr_recursive(s, c, y)).epsilon(1e-10));
  CHECK(rho.rhoSY_givenC ==
        doctest::Approx(testsup::partial_corr_recursive(s, y, c)).epsilon(1e-10));
  CHECK(rho.rhoCY_givenS ==
        doctest::Approx(testsup::partial_corr_recursive(c, y, s)).epsilon(1e-10));
  CHECK(std::abs(rho.rhoSC_givenY) <= 1.0);
  CHECK(std::abs(rho.rhoSY_givenC) <= 1.0);
  CHECK(std::abs(rho.rhoCY_givenS) <= 1.0);
}

TEST_CASE("identity precision has zero partial correlations") {
  ThreeVarPrecision p;
  p.entries = Eigen::Matrix3d::Identity();
  p.sampleCount = 10;
  const PartialCorrelations rho = partial_correlations(p);
  CHECK(rho.rhoSC_givenY == 0.0);
  CHECK(rho.rhoSY_givenC == 0.0);
  CHECK(rho.rhoCY_givenS == 0.0);
}

TEST_CASE("non-positive precision diagonal is rejected") {
  ThreeVarPrecision p;
  p.entries = Eigen::Matrix3d::Identity();
  p.entries(1, 1) = 0.0;
  CHECK_THROWS_AS(partial_correlations(p), std::invalid_argument);
}

TEST_CASE("precision requires at least four samples") {
  Rng rng = make_rng(33);
  CHECK_THROWS_AS(empirical_precision(randn(3, rng), randn(3, rng), randn(3, rng)),
                  std::invalid_argument);
}
