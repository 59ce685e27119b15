#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "merlin/algorithms.hpp"
#include "merlin/checks.hpp"
#include "merlin/dataset.hpp"
#include "merlin/errors.hpp"
#include "merlin/metrics.hpp"
#include "merlin/sweep.hpp"
#include "merlin/synth.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 1 failed self-check, 2 usage/validation, 3 numerical failure.
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

merlin::BandSpec parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("band must be LO:HI in Hz, got '" + text + "'");
  try {
    return merlin::BandSpec{std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("band must be LO:HI in Hz, got '" + text + "'");
  }
}

Eigen::VectorXd parse_inline_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad numeric field '" + field + "'");
    }
  }
  if (values.empty()) throw std::invalid_argument("empty vector");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("empty file " + path);
  Eigen::MatrixXd mat(rows.size(), rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) mat(r, c) = rows[r][c];
  return mat;
}

Eigen::VectorXd read_vector(const std::string& path) {
  Eigen::MatrixXd mat = read_csv_file(path);
  if (mat.cols() == 1) return mat.col(0);
  if (mat.rows() == 1) return mat.row(0).transpose();
  throw std::invalid_argument(path + " is not a vector");
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void emit(const json& j, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out(outPath);
    if (!out) throw std::invalid_argument("cannot open for writing: " + outPath);
    out << j.dump(2) << '\n';
  }
}

int thread_cap(int requested) {
  int limit = requested > 0 ? requested
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("MERLIN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) limit = std::min(limit, cap);
  }
  return limit;
}

struct SynthArgs {
  int d = 5, m = 300;
  double a = 1.0, b = 0.0;
  std::string kind = "G";
  std::uint64_t seed = 0;
  std::string out;
  bool timeseries = false;
  int n = 0;
  double fs = 0.0;
  std::string band;
  std::uint64_t tsSeed = 0;
  bool tsSeedSet = false;
};

int cmd_synth(const SynthArgs& args) {
  const merlin::SynthParams params{args.d, args.m, args.a, args.b,
                                   merlin::parse_stimulus_kind(args.kind), args.seed};
  json out{{"path", args.out}, {"d", args.d}, {"m", args.m},       {"a", args.a},
           {"b", args.b},      {"T", args.kind}, {"seed", args.seed}};
  if (args.timeseries) {
    if (args.band.empty()) throw std::invalid_argument("--timeseries requires --band");
    const merlin::BandSpec band = parse_band(args.band);
    const std::uint64_t carrierSeed =
        args.tsSeedSet ? args.tsSeed : merlin::mix_seed(args.seed, 0x7d);
    const merlin::Dataset3D ds =
        merlin::gen_timeseries_dataset(params, args.n, args.fs, band, carrierSeed);
    merlin::save_bundle(ds, args.out);
    out["kind"] = "3d";
    out["n"] = args.n;
    out["fs"] = args.fs;
    out["carrierSeed"] = carrierSeed;
  } else {
    const merlin::Dataset2D ds = merlin::gen_dataset(params);
    merlin::save_bundle(ds, args.out);
    out["kind"] = "2d";
  }
  std::cerr << "wrote " << out["kind"].get<std::string>() << " bundle to " << args.out << " (d="
            << args.d << ", m=" << args.m << ", a=" << args.a << ", b=" << args.b << ", T="
            << args.kind << ", seed=" << args.seed << ")\n";
  emit(out, "");
  return 0;
}

struct RunArgs {
  std::string bundle;
  std::string variant = "basic";
  std::string band;
  std::uint64_t seed = 0;
  int restarts = 10;
  int maxIters = 500;
  double epsilon = 1e-12;
  double lambda = 0.5;
  std::string out;
};

int cmd_run(const RunArgs& args) {
  const merlin::Variant variant = merlin::parse_variant(args.variant);
  const merlin::Dataset ds = merlin::load_bundle(args.bundle);

  merlin::OptConfig opt;
  opt.seed = args.seed;
  opt.restarts = args.restarts;
  opt.maxIters = args.maxIters;
  merlin::ObjectiveConfig cfg;
  cfg.epsilon = args.epsilon;
  cfg.lambda = args.lambda;

  merlin::MerlinResult result;
  std::optional<Eigen::VectorXd> truth;
  if (variant == merlin::Variant::Basic) {
    const auto* ds2 = std::get_if<merlin::Dataset2D>(&ds);
    if (!ds2) throw std::invalid_argument("variant basic requires a 2d bundle");
    truth = ds2->wG0;
    result = merlin::merlin_basic(*ds2, cfg, opt);
  } else {
    const auto* ds3 = std::get_if<merlin::Dataset3D>(&ds);
    if (!ds3) throw std::invalid_argument("variant " + args.variant + " requires a 3d bundle");
    if (args.band.empty()) throw std::invalid_argument("timeseries variants require --band");
    const merlin::BandSpec band = parse_band(args.band);
    truth = ds3->wG0;
    result = variant == merlin::Variant::Bp ? merlin::merlin_bp(*ds3, band, cfg, opt)
                                            : merlin::merlin_bpplus(*ds3, band, cfg, opt);
  }

  json out{{"variant", merlin::to_string(result.variant)},
           {"w", to_std(result.w)},
           {"objective", result.objective},
           {"iterations", result.diagnostics.iterations},
           {"terminationReason", merlin::to_string(result.diagnostics.reason)},
           {"restarts", args.restarts},
           {"restartIndex", result.diagnostics.restartIndex},
           {"seed", args.seed}};
  if (truth) {
    out["andi"] = merlin::andi(result.w, *truth);
    out["pobv"] = merlin::pobv(result.w, *truth);
  }
  std::cerr << "variant " << merlin::to_string(result.variant) << ": objective "
            << result.objective << " after " << result.diagnostics.iterations
            << " iterations (" << merlin::to_string(result.diagnostics.reason) << ")\n";
  emit(out, args.out);
  return 0;
}

struct EvalArgs {
  std::string wPath, wInline;
  std::string truthPath, truthInline;
  bool pattern = false;
  std::string covPath;
};

int cmd_eval(const EvalArgs& args) {
  if (args.wPath.empty() == args.wInline.empty())
    throw std::invalid_argument("provide exactly one of --w / --w-inline");
  if (args.truthPath.empty() == args.truthInline.empty())
    throw std::invalid_argument("provide exactly one of --wg0 / --wg0-inline");
  Eigen::VectorXd w = args.wPath.empty() ? parse_inline_vector(args.wInline)
                                         : read_vector(args.wPath);
  Eigen::VectorXd truth = args.truthPath.empty() ? parse_inline_vector(args.truthInline)
                                                 : read_vector(args.truthPath);
  const double wn = w.norm();
  const double tn = truth.norm();
  if (!(wn > 0.0) || !(tn > 0.0)) throw std::invalid_argument("zero-norm vector");
  w /= wn;
  truth /= tn;

  const merlin::MetricReport report = merlin::metric_report(w, truth);
  json out{{"andi", report.andi}, {"pobv", report.pobv}, {"capHeight", report.capHeight}};
  if (args.pattern) {
    if (args.covPath.empty()) throw std::invalid_argument("--pattern requires --cov");
    const Eigen::MatrixXd sigma = read_csv_file(args.covPath);
    out["pattern"] = to_std(merlin::activation_pattern(w, sigma));
  }
  emit(out, "");
  return 0;
}

struct SweepArgs {
  std::string specPath;
  std::string outDir;
  int parallelism = 0;
};

int cmd_sweep(const SweepArgs& args) {
  const merlin::SweepSpec spec = merlin::load_sweep_spec(args.specPath);
  const int workers = thread_cap(args.parallelism);
  std::cerr << "running " << spec.cellCount() << " cells x " << spec.runsPerCell
            << " runs on " << workers << " workers\n";
  const merlin::SweepResult result = merlin::run_sweep(spec, workers);

  std::filesystem::create_directories(args.outDir);
  const auto resultsPath = std::filesystem::path(args.outDir) / "results.json";
  const auto summaryPath = std::filesystem::path(args.outDir) / "summary.csv";
  merlin::write_results_json(spec, result, resultsPath);
  merlin::write_summary_csv(spec, result, summaryPath);

  int failures = 0;
  int skipped = 0;
  for (const auto& cell : result.cells) {
    failures += cell.failures;
    if (cell.skipped) ++skipped;
  }
  emit(json{{"results", resultsPath.string()},
            {"summary", summaryPath.string()},
            {"cells", result.cells.size()},
            {"skippedCells", skipped},
            {"failedRuns", failures}},
       "");
  return 0;
}

int cmd_check(bool quick) {
  const auto results = merlin::run_self_checks(quick);
  bool allPassed = true;
  json checks = json::array();
  for (const auto& r : results) {
    allPassed = allPassed && r.passed;
    std::cerr << (r.passed ? "[ ok ] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
    checks.push_back(json{{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  emit(json{{"passed", allPassed}, {"checks", checks}}, "");
  return allPassed ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MERLiN: recover a linear causal effect from an observed mixture"};
  app.require_subcommand(1);

  SynthArgs synthArgs;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset bundle");
  synth->add_option("--d", synthArgs.d, "number of mixture channels (>= 5)");
  synth->add_option("--m", synthArgs.m, "number of samples/trials");
  synth->add_option("--a", synthArgs.a, "noise level on the C1 -> C2 link");
  synth->add_option("--b", synthArgs.b, "hidden confounding strength");
  synth->add_option("--T", synthArgs.kind, "stimulus kind: G (gaussian) or B (binary)");
  synth->add_option("--seed", synthArgs.seed, "generator seed");
  synth->add_option("--out", synthArgs.out, "output bundle directory")->required();
  synth->add_flag("--timeseries", synthArgs.timeseries, "generate a 3d trial-timeseries bundle");
  synth->add_option("--n", synthArgs.n, "samples per trial (timeseries)");
  synth->add_option("--fs", synthArgs.fs, "sampling frequency in Hz (timeseries)");
  synth->add_option("--band", synthArgs.band, "frequency band LO:HI in Hz (timeseries)");
  auto* tsSeedOpt = synth->add_option("--ts-seed", synthArgs.tsSeed,
                                      "carrier seed (defaults to a value derived from --seed)");

  RunArgs runArgs;
  auto* run = app.add_subcommand("run", "run a recovery variant on a bundle");
  run->add_option("--bundle", runArgs.bundle, "bundle directory")->required();
  run->add_option("--variant", runArgs.variant, "basic|bp|bp+");
  run->add_option("--band", runArgs.band, "frequency band LO:HI in Hz (bp variants)");
  run->add_option("--seed", runArgs.seed, "optimizer seed");
  run->add_option("--restarts", runArgs.restarts, "number of random restarts");
  run->add_option("--max-iters", runArgs.maxIters, "iteration cap per restart");
  run->add_option("--epsilon", runArgs.epsilon, "smoothing constant for |x|");
  run->add_option("--lambda", runArgs.lambda, "dependence/independence weight in [0,1]");
  run->add_option("--out", runArgs.out, "write the result JSON here instead of stdout");

  EvalArgs evalArgs;
  auto* eval = app.add_subcommand("eval", "evaluate recovery metrics for a vector");
  eval->add_option("--w", evalArgs.wPath, "recovered vector (CSV file)");
  eval->add_option("--w-inline", evalArgs.wInline, "recovered vector, comma-separated");
  eval->add_option("--wg0", evalArgs.truthPath, "ground-truth vector (CSV file)");
  eval->add_option("--wg0-inline", evalArgs.truthInline, "ground-truth vector, comma-separated");
  eval->add_flag("--pattern", evalArgs.pattern, "also emit the activation pattern");
  eval->add_option("--cov", evalArgs.covPath, "channel covariance CSV (for --pattern)");

  SweepArgs sweepArgs;
  auto* sweep = app.add_subcommand("sweep", "run a grid sweep from a JSON spec");
  sweep->add_option("--spec", sweepArgs.specPath, "sweep spec JSON file")->required();
  sweep->add_option("--out-dir", sweepArgs.outDir, "directory for results.json/summary.csv")
      ->required();
  sweep->add_option("--parallelism", sweepArgs.parallelism,
                    "worker count (0 = hardware; MERLIN_THREADS caps it)");

  bool quick = false;
  auto* check = app.add_subcommand("check", "run the built-in verification battery");
  check->add_flag("--quick", quick, "smaller sample sizes, completes in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      synthArgs.tsSeedSet = tsSeedOpt->count() > 0;
      return cmd_synth(synthArgs);
    }
    if (run->parsed()) return cmd_run(runArgs);
    if (eval->parsed()) return cmd_eval(evalArgs);
    if (sweep->parsed()) return cmd_sweep(sweepArgs);
    if (check->parsed()) return cmd_check(quick);
  } catch (const merlin::SingularCovarianceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const merlin::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
