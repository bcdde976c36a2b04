#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "viewpath/bayes.hpp"
#include "viewpath/episode.hpp"

namespace viewpath {

/// Deterministic per-NBV log (byte-identical for identical seed + strategy).
std::string episode_csv(const EpisodeLog& log);
/// Wall-clock companion: planner overhead and headline time per NBV step.
std::string timing_csv(const EpisodeLog& log);
std::string trace_csv(const EpisodeLog& log);
std::string focus_trace_csv(const EpisodeLog& log);
std::string summary_json(const EpisodeLog& log);

/// Writes episode.csv, timing.csv, focus_trace.csv, summary.json (last) and,
/// when traced, diagnostics.csv into `dir`.
void write_episode_outputs(const EpisodeLog& log, const std::string& dir);

struct RunManifest {
  std::string scenario;
  std::vector<std::uint64_t> seeds;
  std::vector<Strategy> strategies;
  std::string out_dir;
  int parallelism = 1;
};

/// JSON manifest; relative paths resolve against the manifest directory.
/// `default_parallelism` applies when the manifest does not set one.
RunManifest load_manifest(const std::string& path, int default_parallelism = 1);

std::string episode_dir_name(Strategy s, std::uint64_t seed);

struct SweepReport {
  int completed = 0;
  int skipped = 0;  // already present from an earlier run
  int aborted = 0;
  int failed = 0;
  double wall_time = 0.0;
};

/// Runs every (seed, strategy) pair not yet present under out_dir, then
/// writes summary.csv. `progress` (optional) receives one line per episode.
SweepReport run_sweep(const RunManifest& manifest, std::ostream* progress = nullptr);

/// Final-step metrics of one episode directory.
struct EpisodeResult {
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::kFocus;
  std::string object;
  bool aborted = false;
  int legs = 0;
  double coverage = 0.0;
  double entropy = 0.0;
  double travel_time = 0.0;
  double planner_wall = 0.0;
  double total_time = 0.0;
  double leg_overhead = 0.0;  // planner_wall / legs
  double max_entropy = 0.0;
  int vfi_violations = 0;
  int penetrations = 0;
  double min_softmin = 0.0;
  double min_clearance = 0.0;
  int visibility_steps = 0;
  int visibility_ok = 0;
};

/// Reads every episode directory (one holding summary.json) below `dir`.
std::vector<EpisodeResult> load_episode_results(const std::string& dir);

/// summary.csv: strategy, metric, n, mean, sd.
std::string sweep_summary_csv(const std::vector<EpisodeResult>& results);

struct RopeConfig {
  Interval coverage{-0.01, 0.01};
  double entropy_fraction_of_max = 0.01;  // +- fraction of the max box entropy
  double time_fraction_of_reference = 0.05;
  Strategy time_reference = Strategy::kNoPath;
};

RopeConfig load_rope_config(const std::string& path);

struct Comparison {
  Strategy a = Strategy::kFocus;
  Strategy b = Strategy::kNoPath;
  std::string metric;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double median_difference = 0.0;
  Interval hdi;
  Interval rope;
  RopeVerdict verdict;
  std::vector<double> acceptance;
  std::vector<double> difference_draws;
};

/// Bayesian difference-of-means for coverage, entropy and total time between
/// every pair of strategies present in `results`.
std::vector<Comparison> compare_strategies(const std::vector<EpisodeResult>& results,
                                           const RopeConfig& rope, const ChainConfig& chains);

/// report.json plus one histogram CSV per comparison (bin_lo, bin_hi, count).
void write_analysis(const std::vector<Comparison>& comparisons, const std::string& out_dir, int bins = 50);

}  // namespace viewpath
