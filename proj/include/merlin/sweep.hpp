#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "merlin/algorithms.hpp"
#include "merlin/synth.hpp"

namespace merlin {

/// Grid sweep: for every (T, d, m, a, b) cell, run the chosen variant on
/// runsPerCell freshly generated datasets and collect andi/pobv against each
/// dataset's own ground truth.
struct SweepSpec {
  Variant variant = Variant::Basic;
  std::vector<StimulusKind> kinds{StimulusKind::Gaussian};
  std::vector<int> dims{5};
  std::vector<int> samples{300};
  std::vector<double> noiseLevels{1.0};
  std::vector<double> confounds{0.0};
  int runsPerCell = 20;
  std::uint64_t baseSeed = 0;
  OptConfig opt;
  ObjectiveConfig objective;
  // Timeseries parameters, required when variant != Basic.
  int tsLength = 0;
  double tsFs = 0.0;
  BandSpec band;

  void validate() const;
  int cellCount() const;
};

struct RunRecord {
  double andi = 0.0;
  double pobv = 0.0;
  double objective = 0.0;
  std::string termination;
  std::uint64_t seed = 0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct Quantiles {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct CellResult {
  StimulusKind kind = StimulusKind::Gaussian;
  int d = 0;
  int m = 0;
  double a = 0.0;
  double b = 0.0;
  bool skipped = false;
  std::string skipReason;
  std::vector<RunRecord> runs;
  int failures = 0;
  bool flagged = false;  // more than 20% of runs failed
  Quantiles andiQ, pobvQ, objectiveQ;
};

struct SweepResult {
  std::vector<CellResult> cells;
};

/// Executes the sweep on `parallelism` workers. Seeds derive as
/// mix_seed(baseSeed, cellIndex, runIndex), so the output is identical for
/// any worker count and across repeated invocations.
SweepResult run_sweep(const SweepSpec& spec, int parallelism = 1);

/// JSON round-trip of the spec (schema documented in the README) and the
/// result files the CLI writes.
SweepSpec load_sweep_spec(const std::filesystem::path& jsonPath);
void write_results_json(const SweepSpec& spec, const SweepResult& result,
                        const std::filesystem::path& path);
void write_summary_csv(const SweepSpec& spec, const SweepResult& result,
                       const std::filesystem::path& path);

std::string to_string(StimulusKind k);
StimulusKind parse_stimulus_kind(const std::string& s);

}  // namespace merlin
