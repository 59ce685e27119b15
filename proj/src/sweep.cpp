#include "merlin/sweep.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "merlin/errors.hpp"
#include "merlin/metrics.hpp"
#include "merlin/random.hpp"

namespace merlin {

using nlohmann::json;

std::string to_string(StimulusKind k) { return k == StimulusKind::Gaussian ? "G" : "B"; }

StimulusKind parse_stimulus_kind(const std::string& s) {
  if (s == "G") return StimulusKind::Gaussian;
  if (s == "B") return StimulusKind::Binary;
  throw std::invalid_argument("unknown stimulus kind '" + s + "' (use G|B)");
}

void SweepSpec::validate() const {
  if (runsPerCell < 1) throw std::invalid_argument("runsPerCell must be >= 1");
  if (kinds.empty() || dims.empty() || samples.empty() || noiseLevels.empty() ||
      confounds.empty())
    throw std::invalid_argument("sweep grids must be non-empty");
  opt.validate();
  objective.validate();
  if (variant != Variant::Basic) {
    if (tsLength < 4) throw std::invalid_argument("timeseries length must be >= 4");
    band.validate_for(tsFs);
  }
}

int SweepSpec::cellCount() const {
  return static_cast<int>(kinds.size() * dims.size() * samples.size() * noiseLevels.size() *
                          confounds.size());
}

namespace {

struct CellCoord {
  StimulusKind kind;
  int d, m;
  double a, b;
};

// Cell order: T outermost, then d, m, a, b. The linear index feeds the seed
// derivation, so this order is part of the determinism contract.
std::vector<CellCoord> enumerate_cells(const SweepSpec& spec) {
  std::vector<CellCoord> cells;
  cells.reserve(spec.cellCount());
  for (StimulusKind kind : spec.kinds)
    for (int d : spec.dims)
      for (int m : spec.samples)
        for (double a : spec.noiseLevels)
          for (double b : spec.confounds) cells.push_back({kind, d, m, a, b});
  return cells;
}

RunRecord execute_run(const SweepSpec& spec, const CellCoord& cell, std::uint64_t runSeed) {
  RunRecord rec;
  rec.seed = runSeed;
  try {
    SynthParams params{cell.d, cell.m, cell.a, cell.b, cell.kind, runSeed};
    OptConfig opt = spec.opt;
    opt.seed = mix_seed(runSeed, 1);

    MerlinResult result;
    Eigen::VectorXd truth;
    if (spec.variant == Variant::Basic) {
      const Dataset2D ds = gen_dataset(params);
      truth = *ds.wG0;
      result = merlin_basic(ds, spec.objective, opt);
    } else {
      const Dataset3D ds =
          gen_timeseries_dataset(params, spec.tsLength, spec.tsFs, spec.band, mix_seed(runSeed, 2));
      truth = *ds.wG0;
      result = spec.variant == Variant::Bp
                   ? merlin_bp(ds, spec.band, spec.objective, opt)
                   : merlin_bpplus(ds, spec.band, spec.objective, opt);
    }
    rec.andi = andi(result.w, truth);
    rec.pobv = pobv(result.w, truth);
    rec.objective = result.objective;
    rec.termination = to_string(result.diagnostics.reason);
  } catch (const SingularCovarianceError& e) {
    rec.error = std::string("singular-covariance: ") + e.what();
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

Quantiles quantiles_of(std::vector<double> values) {
  Quantiles q;
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  auto interp = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const auto hi = static_cast<size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  q.min = values.front();
  q.q1 = interp(0.25);
  q.median = interp(0.5);
  q.q3 = interp(0.75);
  q.max = values.back();
  return q;
}

void summarize_cell(CellResult& cell) {
  std::vector<double> andis, pobvs, objectives;
  cell.failures = 0;
  for (const RunRecord& r : cell.runs) {
    if (r.ok()) {
      andis.push_back(r.andi);
      pobvs.push_back(r.pobv);
      objectives.push_back(r.objective);
    } else {
      ++cell.failures;
    }
  }
  cell.flagged = cell.failures * 5 > static_cast<int>(cell.runs.size());  // > 20%
  cell.andiQ = quantiles_of(std::move(andis));
  cell.pobvQ = quantiles_of(std::move(pobvs));
  cell.objectiveQ = quantiles_of(std::move(objectives));
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int parallelism) {
  spec.validate();
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");

  const std::vector<CellCoord> coords = enumerate_cells(spec);
  SweepResult result;
  result.cells.resize(coords.size());

  struct Task {
    int cell;
    int run;
  };
  std::vector<Task> tasks;
  for (size_t c = 0; c < coords.size(); ++c) {
    CellResult& cell = result.cells[c];
    cell.kind = coords[c].kind;
    cell.d = coords[c].d;
    cell.m = coords[c].m;
    cell.a = coords[c].a;
    cell.b = coords[c].b;
    if (spec.variant == Variant::Basic && cell.d > cell.m) {
      cell.skipped = true;
      cell.skipReason = "basic variant requires d <= m";
      continue;
    }
    cell.runs.resize(spec.runsPerCell);
    for (int r = 0; r < spec.runsPerCell; ++r) tasks.push_back({static_cast<int>(c), r});
  }

  // Deterministic by construction: every task writes its own preassigned
  // slot, so the merge is independent of scheduling.
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const Task task = tasks[i];
      const std::uint64_t seed = mix_seed(spec.baseSeed, static_cast<std::uint64_t>(task.cell),
                                          static_cast<std::uint64_t>(task.run));
      result.cells[task.cell].runs[task.run] = execute_run(spec, coords[task.cell], seed);
    }
  };
  const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (CellResult& cell : result.cells)
    if (!cell.skipped) summarize_cell(cell);
  return result;
}

namespace {

json quantiles_json(const Quantiles& q) {
  return json{{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

json spec_json(const SweepSpec& spec) {
  json j;
  j["variant"] = to_string(spec.variant);
  json kinds = json::array();
  for (auto k : spec.kinds) kinds.push_back(to_string(k));
  j["T"] = kinds;
  j["d"] = spec.dims;
  j["m"] = spec.samples;
  j["a"] = spec.noiseLevels;
  j["b"] = spec.confounds;
  j["runsPerCell"] = spec.runsPerCell;
  j["baseSeed"] = spec.baseSeed;
  j["opt"] = json{{"maxIters", spec.opt.maxIters},
                  {"minStepSize", spec.opt.minStepSize},
                  {"minGradNorm", spec.opt.minGradNorm},
                  {"armijoSlope", spec.opt.armijoSlope},
                  {"backtrackFactor", spec.opt.backtrackFactor},
                  {"initialStep", spec.opt.initialStep},
                  {"restarts", spec.opt.restarts}};
  j["objective"] = json{{"epsilon", spec.objective.epsilon}, {"lambda", spec.objective.lambda}};
  if (spec.variant != Variant::Basic)
    j["timeseries"] =
        json{{"n", spec.tsLength}, {"fs", spec.tsFs}, {"band", {spec.band.omega1, spec.band.omega2}}};
  return j;
}

}  // namespace

SweepSpec load_sweep_spec(const std::filesystem::path& jsonPath) {
  std::ifstream in(jsonPath);
  if (!in) throw std::invalid_argument("cannot open sweep spec: " + jsonPath.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("bad sweep spec JSON: " + std::string(e.what()));
  }

  SweepSpec spec;
  try {
    spec.variant = parse_variant(j.value("variant", "basic"));
    if (j.contains("T")) {
      spec.kinds.clear();
      for (const auto& k : j.at("T")) spec.kinds.push_back(parse_stimulus_kind(k));
    }
    if (j.contains("d")) spec.dims = j.at("d").get<std::vector<int>>();
    if (j.contains("m")) spec.samples = j.at("m").get<std::vector<int>>();
    if (j.contains("a")) spec.noiseLevels = j.at("a").get<std::vector<double>>();
    if (j.contains("b")) spec.confounds = j.at("b").get<std::vector<double>>();
    spec.runsPerCell = j.value("runsPerCell", spec.runsPerCell);
    spec.baseSeed = j.value("baseSeed", spec.baseSeed);
    if (j.contains("opt")) {
      const auto& o = j.at("opt");
      spec.opt.maxIters = o.value("maxIters", spec.opt.maxIters);
      spec.opt.minStepSize = o.value("minStepSize", spec.opt.minStepSize);
      spec.opt.minGradNorm = o.value("minGradNorm", spec.opt.minGradNorm);
      spec.opt.armijoSlope = o.value("armijoSlope", spec.opt.armijoSlope);
      spec.opt.backtrackFactor = o.value("backtrackFactor", spec.opt.backtrackFactor);
      spec.opt.initialStep = o.value("initialStep", spec.opt.initialStep);
      spec.opt.restarts = o.value("restarts", spec.opt.restarts);
    }
    if (j.contains("objective")) {
      const auto& o = j.at("objective");
      spec.objective.epsilon = o.value("epsilon", spec.objective.epsilon);
      spec.objective.lambda = o.value("lambda", spec.objective.lambda);
    }
    if (j.contains("timeseries")) {
      const auto& t = j.at("timeseries");
      spec.tsLength = t.value("n", 0);
      spec.tsFs = t.value("fs", 0.0);
      const auto band = t.at("band").get<std::vector<double>>();
      if (band.size() != 2) throw std::invalid_argument("timeseries.band must be [lo, hi]");
      spec.band = BandSpec{band[0], band[1]};
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument("bad sweep spec: " + std::string(e.what()));
  }
  spec.validate();
  return spec;
}

void write_results_json(const SweepSpec& spec, const SweepResult& result,
                        const std::filesystem::path& path) {
  json j;
  j["spec"] = spec_json(spec);
  j["seedDerivation"] =
      "runSeed = splitmix64(splitmix64(splitmix64(baseSeed) ^ cellIndex) ^ runIndex)";
  json cells = json::array();
  for (const CellResult& cell : result.cells) {
    json c;
    c["T"] = to_string(cell.kind);
    c["d"] = cell.d;
    c["m"] = cell.m;
    c["a"] = cell.a;
    c["b"] = cell.b;
    c["skipped"] = cell.skipped;
    if (cell.skipped) {
      c["skipReason"] = cell.skipReason;
    } else {
      json runs = json::array();
      for (const RunRecord& r : cell.runs) {
        json run;
        run["seed"] = r.seed;
        if (r.ok()) {
          run["andi"] = r.andi;
          run["pobv"] = r.pobv;
          run["objective"] = r.objective;
          run["terminationReason"] = r.termination;
        } else {
          run["error"] = r.error;
        }
        runs.push_back(std::move(run));
      }
      c["runs"] = std::move(runs);
      c["failures"] = cell.failures;
      c["flagged"] = cell.flagged;
      c["andi"] = quantiles_json(cell.andiQ);
      c["pobv"] = quantiles_json(cell.pobvQ);
      c["objective"] = quantiles_json(cell.objectiveQ);
    }
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_summary_csv(const SweepSpec& spec, const SweepResult& result,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "variant,T,d,m,a,b,runs,failures,skipped";
  for (const char* metric : {"andi", "pobv", "objective"})
    for (const char* q : {"min", "q1", "median", "q3", "max"}) out << ',' << metric << '_' << q;
  out << '\n';
  char buf[64];
  auto fmt = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  for (const CellResult& cell : result.cells) {
    out << to_string(spec.variant) << ',' << to_string(cell.kind) << ',' << cell.d << ','
        << cell.m << ',' << fmt(cell.a) << ',' << fmt(cell.b) << ',' << cell.runs.size() << ','
        << cell.failures << ',' << (cell.skipped ? 1 : 0);
    for (const Quantiles* q : {&cell.andiQ, &cell.pobvQ, &cell.objectiveQ})
      out << ',' << fmt(q->min) << ',' << fmt(q->q1) << ',' << fmt(q->median) << ','
          << fmt(q->q3) << ',' << fmt(q->max);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace merlin
