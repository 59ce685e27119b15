#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "merlin/algorithms.hpp"
#include "merlin/checks.hpp"
#include "merlin/dataset.hpp"
#include "merlin/errors.hpp"
#include "merlin/metrics.hpp"
#include "merlin/spectral.hpp"
#include "merlin/sphere_opt.hpp"
#include "merlin/stats.hpp"
#include "merlin/sweep.hpp"
#include "merlin/synth.hpp"

namespace py = pybind11;
using namespace merlin;

namespace {

py::array_t<double> tensor_of(const Dataset3D& ds) {
  const int d = ds.d(), m = ds.m(), n = ds.n();
  py::array_t<double> out({d, m, n});
  auto buf = out.mutable_unchecked<3>();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < n; ++k) buf(i, j, k) = ds.Ftilde(k, static_cast<Eigen::Index>(i) * m + j);
  return out;
}

Dataset3D dataset3d_from(const Eigen::VectorXd& S, const py::array_t<double>& tensor,
                         const Eigen::VectorXd& v, double fs,
                         const std::optional<Eigen::VectorXd>& wG0) {
  if (tensor.ndim() != 3) throw std::invalid_argument("tensor must have shape (d, m, n)");
  const auto d = static_cast<int>(tensor.shape(0));
  const auto m = static_cast<int>(tensor.shape(1));
  const auto n = static_cast<int>(tensor.shape(2));
  Dataset3D ds;
  ds.channels = d;
  ds.fs = fs;
  ds.S = S;
  ds.v = v;
  ds.wG0 = wG0;
  ds.Ftilde.resize(n, static_cast<Eigen::Index>(d) * m);
  auto buf = tensor.unchecked<3>();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < n; ++k) ds.Ftilde(k, static_cast<Eigen::Index>(i) * m + j) = buf(i, j, k);
  ds.finalize();
  return ds;
}

StimulusKind kind_from(const std::string& s) { return parse_stimulus_kind(s); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Recovery of linear causal effects from observed mixtures";

  py::register_exception<SingularCovarianceError>(m, "SingularCovarianceError",
                                                  PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<BandSpec>(m, "BandSpec")
      .def(py::init<double, double>(), py::arg("omega1"), py::arg("omega2"))
      .def_readwrite("omega1", &BandSpec::omega1)
      .def_readwrite("omega2", &BandSpec::omega2);

  py::class_<Dataset2D>(m, "Dataset2D")
      .def(py::init([](const Eigen::VectorXd& S, const Eigen::MatrixXd& F,
                       const Eigen::VectorXd& v, const std::optional<Eigen::VectorXd>& wG0) {
             Dataset2D ds;
             ds.S = S;
             ds.F = F;
             ds.v = v;
             ds.wG0 = wG0;
             ds.finalize();
             return ds;
           }),
           py::arg("S"), py::arg("F"), py::arg("v"), py::arg("wG0") = std::nullopt)
      .def_readonly("S", &Dataset2D::S)
      .def_readonly("F", &Dataset2D::F)
      .def_readonly("v", &Dataset2D::v)
      .def_readonly("wG0", &Dataset2D::wG0)
      .def_property_readonly("d", &Dataset2D::d)
      .def_property_readonly("m", &Dataset2D::m);

  py::class_<Dataset3D>(m, "Dataset3D")
      .def(py::init(&dataset3d_from), py::arg("S"), py::arg("tensor"), py::arg("v"),
           py::arg("fs"), py::arg("wG0") = std::nullopt)
      .def_readonly("S", &Dataset3D::S)
      .def_readonly("v", &Dataset3D::v)
      .def_readonly("wG0", &Dataset3D::wG0)
      .def_readonly("fs", &Dataset3D::fs)
      .def_property_readonly("d", &Dataset3D::d)
      .def_property_readonly("m", &Dataset3D::m)
      .def_property_readonly("n", &Dataset3D::n)
      .def_property_readonly("tensor", &tensor_of, "channel x trial x time payload");

  py::class_<ObjectiveConfig>(m, "ObjectiveConfig")
      .def(py::init<>())
      .def(py::init([](double epsilon, double lambda) {
             ObjectiveConfig cfg;
             cfg.epsilon = epsilon;
             cfg.lambda = lambda;
             cfg.validate();
             return cfg;
           }),
           py::arg("epsilon") = 1e-12, py::arg("lambda_") = 0.5)
      .def_readwrite("epsilon", &ObjectiveConfig::epsilon)
      .def_readwrite("lambda_", &ObjectiveConfig::lambda);

  py::class_<OptConfig>(m, "OptConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &OptConfig::maxIters)
      .def_readwrite("min_step_size", &OptConfig::minStepSize)
      .def_readwrite("min_grad_norm", &OptConfig::minGradNorm)
      .def_readwrite("armijo_slope", &OptConfig::armijoSlope)
      .def_readwrite("backtrack_factor", &OptConfig::backtrackFactor)
      .def_readwrite("initial_step", &OptConfig::initialStep)
      .def_readwrite("restarts", &OptConfig::restarts)
      .def_readwrite("seed", &OptConfig::seed)
      .def_readwrite("keep_trace", &OptConfig::keepTrace);

  py::class_<OptResult>(m, "OptResult")
      .def_readonly("w_star", &OptResult::wStar)
      .def_readonly("f_star", &OptResult::fStar)
      .def_readonly("iterations", &OptResult::iterations)
      .def_readonly("restart_index", &OptResult::restartIndex)
      .def_property_readonly("termination",
                             [](const OptResult& r) { return to_string(r.reason); })
      .def_readonly("trace", &OptResult::trace);

  py::class_<MerlinResult>(m, "MerlinResult")
      .def_readonly("w", &MerlinResult::w)
      .def_readonly("objective", &MerlinResult::objective)
      .def_readonly("diagnostics", &MerlinResult::diagnostics)
      .def_property_readonly("variant",
                             [](const MerlinResult& r) { return to_string(r.variant); });

  py::class_<SpectralBundle>(m, "SpectralBundle")
      .def_readonly("V_im", &SpectralBundle::VIm)
      .def_readonly("V_re", &SpectralBundle::VRe)
      .def_readonly("bin_lo", &SpectralBundle::binLo)
      .def_readonly("bin_hi", &SpectralBundle::binHi)
      .def_readonly("n_original", &SpectralBundle::nOriginal)
      .def_readonly("fs", &SpectralBundle::fs)
      .def_property_readonly("bins", &SpectralBundle::bins)
      .def_property_readonly("trials", &SpectralBundle::trials);

  m.def(
      "gen_dataset",
      [](int d, int mm, double a, double b, const std::string& kind, std::uint64_t seed,
         bool identityMixing) {
        return gen_dataset(SynthParams{d, mm, a, b, kind_from(kind), seed}, identityMixing);
      },
      py::arg("d"), py::arg("m"), py::arg("a"), py::arg("b"), py::arg("kind") = "G",
      py::arg("seed") = 0, py::arg("identity_mixing") = false);

  m.def(
      "gen_timeseries_dataset",
      [](int d, int mm, double a, double b, const std::string& kind, std::uint64_t seed, int n,
         double fs, const BandSpec& band, std::uint64_t carrierSeed) {
        return gen_timeseries_dataset(SynthParams{d, mm, a, b, kind_from(kind), seed}, n, fs,
                                      band, carrierSeed);
      },
      py::arg("d"), py::arg("m"), py::arg("a"), py::arg("b"), py::arg("kind"), py::arg("seed"),
      py::arg("n"), py::arg("fs"), py::arg("band"), py::arg("carrier_seed") = 0);

  m.def("merlin_basic", &merlin_basic, py::arg("dataset"),
        py::arg("objective") = ObjectiveConfig{}, py::arg("opt") = OptConfig{});
  m.def("merlin_bp", &merlin_bp, py::arg("dataset"), py::arg("band"),
        py::arg("objective") = ObjectiveConfig{}, py::arg("opt") = OptConfig{});
  m.def("merlin_bpplus", &merlin_bpplus, py::arg("dataset"), py::arg("band"),
        py::arg("objective") = ObjectiveConfig{}, py::arg("opt") = OptConfig{});

  m.def("preprocess", &preprocess, py::arg("dataset"), py::arg("band"));
  m.def("v_log_bandpower", &v_log_bandpower, py::arg("bundle"));
  m.def("trial_log_bandpower", &trial_log_bandpower, py::arg("w"), py::arg("bundle"));
  m.def("icoh_profile", &icoh_profile, py::arg("w"), py::arg("bundle"));
  m.def(
      "band_bins",
      [](double fs, int n, const BandSpec& band) {
        const BandBins bins = band_bins(fs, n, band);
        return py::make_tuple(bins.lo, bins.hi, bins.count);
      },
      py::arg("fs"), py::arg("n"), py::arg("band"));

  m.def("andi", &andi, py::arg("w"), py::arg("wG0"));
  m.def("pobv", &pobv, py::arg("w"), py::arg("wG0"));
  m.def("reg_inc_beta", &reg_inc_beta, py::arg("x"), py::arg("alpha"), py::arg("beta"));
  m.def("activation_pattern", &activation_pattern, py::arg("w"), py::arg("sigma"));

  m.def(
      "projector", [](const Eigen::VectorXd& v) { return projector(v).P; }, py::arg("v"));
  m.def(
      "empirical_precision",
      [](const Eigen::VectorXd& S, const Eigen::VectorXd& C, const Eigen::VectorXd& Y) {
        return Eigen::MatrixXd(empirical_precision(S, C, Y).entries);
      },
      py::arg("S"), py::arg("C"), py::arg("Y"));
  m.def(
      "partial_correlations",
      [](const Eigen::VectorXd& S, const Eigen::VectorXd& C, const Eigen::VectorXd& Y) {
        const PartialCorrelations rho = partial_correlations(empirical_precision(S, C, Y));
        return py::make_tuple(rho.rhoSC_givenY, rho.rhoSY_givenC, rho.rhoCY_givenS);
      },
      py::arg("S"), py::arg("C"), py::arg("Y"));

  m.def("load_bundle", [](const std::filesystem::path& dir) -> py::object {
    return std::visit([](const auto& ds) { return py::cast(ds); }, load_bundle(dir));
  });
  m.def("save_bundle",
        [](const Dataset2D& ds, const std::filesystem::path& dir) { save_bundle(ds, dir); });
  m.def("save_bundle",
        [](const Dataset3D& ds, const std::filesystem::path& dir) { save_bundle(ds, dir); });

  m.def(
      "self_check",
      [](bool quick) {
        py::list out;
        for (const CheckResult& r : run_self_checks(quick)) {
          py::dict item;
          item["name"] = r.name;
          item["passed"] = r.passed;
          item["detail"] = r.detail;
          out.append(item);
        }
        return out;
      },
      py::arg("quick") = true);
}
