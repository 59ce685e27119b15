#include "merlin/checks.hpp"

#include <cmath>
#include <sstream>

#include "merlin/algorithms.hpp"
#include "merlin/fft.hpp"
#include "merlin/metrics.hpp"
#include "merlin/random.hpp"
#include "merlin/sphere_opt.hpp"
#include "merlin/stats.hpp"
#include "merlin/synth.hpp"

namespace merlin {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

CheckResult gradient_check_basic(int points) {
  const SynthParams params{5, 300, 1.0, 0.5, StimulusKind::Gaussian, 71};
  const Dataset2D ds = gen_dataset(params);
  const Projector proj = projector(ds.v);
  const Eigen::VectorXd c = ds.F.transpose() * ds.v;
  const Eigen::MatrixXd fproj = proj.P * ds.F;
  const ObjectiveConfig cfg;
  const SphereObjective objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    return objective_basic(w, ds.S, c, fproj, cfg, grad);
  };
  Rng rng = make_rng(72);
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const Eigen::VectorXd w = uniform_sphere_sample(ds.d() - 1, rng);
    worst = std::max(worst, check_gradient(objective, ds.d() - 1, w, 1e-6));
  }
  return {"grad-basic", worst < 1e-5, "max relative error " + fmt(worst)};
}

CheckResult gradient_check_timeseries(Variant variant, int points) {
  const SynthParams params{5, 60, 1.0, 0.0, StimulusKind::Gaussian, 73};
  const BandSpec band{8.0, 24.0};
  const Dataset3D ds = gen_timeseries_dataset(params, 64, 64.0, band, 74);
  const SpectralBundle bundle = preprocess(ds, band);
  const Eigen::VectorXd cbp = v_log_bandpower(bundle);
  const ObjectiveConfig cfg;
  const SphereObjective objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    return variant == Variant::Bp ? objective_bp(w, ds.S, cbp, bundle, cfg, grad)
                                  : objective_bpplus(w, ds.S, cbp, bundle, cfg, grad);
  };
  Rng rng = make_rng(75);
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const Eigen::VectorXd w = uniform_sphere_sample(ds.d() - 1, rng);
    worst = std::max(worst, check_gradient(objective, ds.d() - 1, w, 1e-6));
  }
  const std::string name = variant == Variant::Bp ? "grad-bp" : "grad-bp+";
  return {name, worst < 1e-5, "max relative error " + fmt(worst)};
}

CheckResult pobv_montecarlo(int samples) {
  Rng rng = make_rng(76);
  double worst = 0.0;
  for (int d : {2, 5, 20}) {
    const Eigen::VectorXd truth = uniform_sphere_sample(d, rng);
    const Eigen::VectorXd w = uniform_sphere_sample(d, rng);
    const double threshold = std::abs(w.dot(truth));
    int better = 0;
    for (int i = 0; i < samples; ++i)
      if (std::abs(uniform_sphere_sample(d, rng).dot(truth)) > threshold) ++better;
    const double mc = static_cast<double>(better) / samples;
    worst = std::max(worst, std::abs(mc - pobv(w, truth)));
  }
  const double tol = samples >= 100000 ? 0.01 : 0.03;
  return {"pobv-montecarlo", worst < tol, "max |closed form - MC| " + fmt(worst)};
}

CheckResult population_objective(int m, bool quick) {
  const std::vector<double> levels = quick ? std::vector<double>{1.0}
                                           : std::vector<double>{0.5, 1.0, 2.0};
  double worst = 0.0;
  std::uint64_t seed = 77;
  for (double a : levels) {
    const SynthParams params{5, m, a, 0.0, StimulusKind::Gaussian, seed++};
    const Dataset2D ds = gen_dataset(params);
    const Projector proj = projector(ds.v);
    const Eigen::VectorXd c = ds.F.transpose() * ds.v;
    const Eigen::MatrixXd fproj = proj.P * ds.F;
    const Eigen::VectorXd wStar = (proj.P * *ds.wG0).normalized();
    const ObjectiveConfig cfg;  // lambda = 0.5 halves the unweighted value
    const double value = 2.0 * objective_basic(wStar, ds.S, c, fproj, cfg);
    worst = std::max(worst, std::abs(value - 1.0 / (a * a)) / (1.0 / (a * a)));
  }
  return {"population-objective", worst < 0.05, "max relative deviation from 1/a^2 " + fmt(worst)};
}

CheckResult correlation_identities(int m, double tol) {
  auto corr2 = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::VectorXd xc = x.array() - x.mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double c = xc.dot(yc);
    return c * c / (xc.squaredNorm() * yc.squaredNorm());
  };
  double worst = 0.0;
  std::uint64_t seed = 78;
  for (auto [a, b] : {std::pair{1.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}) {
    const SynthParams params{5, m, a, b, StimulusKind::Gaussian, seed++};
    const Dataset2D ds = gen_dataset(params);
    // With orthogonal mixing, C1 and C2 are recovered exactly by v and wG0.
    const Eigen::VectorXd c1 = ds.F.transpose() * ds.v;
    const Eigen::VectorXd c2 = ds.F.transpose() * *ds.wG0;
    const double denom = 2.0 + b * b + a * a;
    worst = std::max(worst, std::abs(corr2(ds.S, c2) - 1.0 / denom));
    worst = std::max(worst, std::abs(corr2(c1, c2) - (2.0 + b * b) / denom));
  }
  return {"correlation-identities", worst < tol, "max absolute deviation " + fmt(worst)};
}

CheckResult dft_against_direct() {
  Rng rng = make_rng(79);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int n : {8, 64, 257}) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = normal(rng);
    const Eigen::VectorXcd fast = fft::forward(x);
    const Eigen::VectorXcd slow = fft::direct_dft(x);
    const double scale = slow.cwiseAbs().maxCoeff();
    worst = std::max(worst, (fast - slow).cwiseAbs().maxCoeff() / scale);
  }
  return {"dft-direct", worst < 1e-8, "max relative deviation " + fmt(worst)};
}

}  // namespace

std::vector<CheckResult> run_self_checks(bool quick) {
  const int gradPoints = quick ? 5 : 20;
  const int mcSamples = quick ? 20000 : 100000;
  const int popSamples = quick ? 20000 : 50000;
  const int corrSamples = quick ? 20000 : 100000;
  const double corrTol = quick ? 0.04 : 0.02;

  std::vector<CheckResult> results;
  results.push_back(gradient_check_basic(gradPoints));
  results.push_back(gradient_check_timeseries(Variant::Bp, gradPoints));
  results.push_back(gradient_check_timeseries(Variant::BpPlus, gradPoints));
  results.push_back(pobv_montecarlo(mcSamples));
  results.push_back(population_objective(popSamples, quick));
  results.push_back(correlation_identities(corrSamples, corrTol));
  results.push_back(dft_against_direct());
  return results;
}

}  // namespace merlin
