#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "merlin/errors.hpp"
#include "merlin/metrics.hpp"
#include "merlin/random.hpp"
#include "merlin/sphere_opt.hpp"

using namespace merlin;

TEST_CASE("angular distance ignores the sign and caps at pi/2") {
  Rng rng = make_rng(301);
  const Eigen::VectorXd truth = uniform_sphere_sample(6, rng);
  CHECK(andi(truth, truth) == 0.0);
  CHECK(andi(-truth, truth) == 0.0);

  Eigen::VectorXd perp = uniform_sphere_sample(6, rng);
  perp = (perp - perp.dot(truth) * truth).normalized();
  CHECK(andi(perp, truth) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(andi(truth, uniform_sphere_sample(4, rng)), std::invalid_argument);
}

TEST_CASE("regularized incomplete beta: endpoints and closed forms") {
  for (double alpha : {0.5, 1.0, 3.0})
    for (double beta : {0.5, 1.0, 2.5}) {
      CHECK(reg_inc_beta(0.0, alpha, beta) == 0.0);
      CHECK(reg_inc_beta(1.0, alpha, beta) == 1.0);
    }
  // I_x(1, 1/2) = 1 - sqrt(1 - x), the antiderivative of the Beta(1, 1/2) pdf.
  CHECK(reg_inc_beta(0.75, 1.0, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
  for (double x : {0.1, 0.42, 0.9})
    CHECK(reg_inc_beta(x, 1.0, 0.5) == doctest::Approx(1.0 - std::sqrt(1.0 - x)).epsilon(1e-10));
  // Arcsine-distribution symmetry point.
  CHECK(reg_inc_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-10));

  CHECK_THROWS_AS(reg_inc_beta(-0.1, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(reg_inc_beta(1.1, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(reg_inc_beta(0.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("incomplete beta symmetry identity") {
  Rng rng = make_rng(303);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> uab(0.2, 8.0);
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng);
    const double a = uab(rng);
    const double b = uab(rng);
    CHECK(std::abs(reg_inc_beta(x, a, b) + reg_inc_beta(1.0 - x, b, a) - 1.0) < 1e-12);
  }
}

TEST_CASE("pobv endpoints, closed form, and monotonicity") {
  Rng rng = make_rng(305);
  const Eigen::VectorXd truth = uniform_sphere_sample(3, rng);
  CHECK(pobv(truth, truth) == 0.0);
  CHECK(pobv(-truth, truth) == 0.0);

  Eigen::VectorXd perp = uniform_sphere_sample(3, rng);
  perp = (perp - perp.dot(truth) * truth).normalized();
  CHECK(pobv(perp, truth) == doctest::Approx(1.0).epsilon(1e-12));

  // d = 3, |w . wG0| = 1/2: h = 1/2, x = 3/4, I_{3/4}(1, 1/2) = 1/2.
  Eigen::VectorXd mid = (0.5 * truth + std::sqrt(0.75) * perp).normalized();
  CHECK(pobv(mid, truth) == doctest::Approx(0.5).epsilon(1e-10));

  // Strictly increasing in the cap height for fixed d.
  double prev = 0.0;
  for (double h : {0.1, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    Eigen::VectorXd w = ((1.0 - h) * truth + std::sqrt(1.0 - (1.0 - h) * (1.0 - h)) * perp);
    const double val = pobv(w.normalized(), truth);
    CHECK(val > prev);
    prev = val;
  }
}

TEST_CASE("pobv matches its monte-carlo definition") {
  Rng rng = make_rng(307);
  const int samples = 20000;
  for (int d : {2, 4, 9}) {
    const Eigen::VectorXd truth = uniform_sphere_sample(d, rng);
    const Eigen::VectorXd w = uniform_sphere_sample(d, rng);
    const double threshold = std::abs(w.dot(truth));
    int better = 0;
    for (int i = 0; i < samples; ++i)
      if (std::abs(uniform_sphere_sample(d, rng).dot(truth)) > threshold) ++better;
    CHECK(std::abs(pobv(w, truth) - static_cast<double>(better) / samples) < 0.02);
  }
}

TEST_CASE("metric report ties the pieces together") {
  Rng rng = make_rng(309);
  const Eigen::VectorXd truth = uniform_sphere_sample(5, rng);
  const Eigen::VectorXd w = uniform_sphere_sample(5, rng);
  const MetricReport r = metric_report(w, truth);
  CHECK(r.andi == andi(w, truth));
  CHECK(r.pobv == pobv(w, truth));
  CHECK(r.capHeight == doctest::Approx(1.0 - std::abs(w.dot(truth))).epsilon(1e-15));

  const MetricReport flipped = metric_report(-w, truth);
  CHECK(flipped.andi == r.andi);
  CHECK(flipped.pobv == r.pobv);
}

TEST_CASE("squared overlap of uniform vectors follows the beta law") {
  Rng rng = make_rng(311);
  const int d = 3;
  const int samples = 20000;
  const Eigen::VectorXd truth = uniform_sphere_sample(d, rng);
  std::vector<double> overlaps(samples);
  for (int i = 0; i < samples; ++i) {
    const double c = uniform_sphere_sample(d, rng).dot(truth);
    overlaps[i] = c * c;
  }
  std::sort(overlaps.begin(), overlaps.end());
  double ks = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double cdf = reg_inc_beta(overlaps[i], 0.5, (d - 1) / 2.0);
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / samples));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / samples));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("activation patterns point along Sigma w") {
  Rng rng = make_rng(313);
  Eigen::VectorXd w = uniform_sphere_sample(4, rng);
  CHECK((activation_pattern(w, Eigen::MatrixXd::Identity(4, 4)) - w).cwiseAbs().maxCoeff() <
        1e-15);

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 1.0;
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2);
  e1[0] = 1.0;
  CHECK((activation_pattern(e1, diag) - e1).cwiseAbs().maxCoeff() < 1e-15);

  // Random SPD covariance: the pattern is exactly parallel to Sigma w.
  Eigen::MatrixXd b = Eigen::MatrixXd::Random(4, 4);
  Eigen::MatrixXd spd = b.transpose() * b + Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd pattern = activation_pattern(w, spd);
  const Eigen::VectorXd sw = spd * w;
  CHECK(std::abs(std::abs(pattern.dot(sw.normalized())) - 1.0) < 1e-12);

  Eigen::MatrixXd asym = spd;
  asym(0, 1) += 1.0;
  CHECK_THROWS_AS(activation_pattern(w, asym), std::invalid_argument);
  CHECK_THROWS_AS(activation_pattern(w, Eigen::MatrixXd::Zero(4, 4)), merlin::NumericalError);
}
