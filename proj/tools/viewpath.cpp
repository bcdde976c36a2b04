// viewpath: run episodes, sweeps and the strategy comparison.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "viewpath/reporting.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kEpisodeAbort = 3;
constexpr int kAnalysisError = 4;

int env_parallelism() {
  if (const char* v = std::getenv("VIEWPATH_JOBS")) {
    try {
      return std::max(1, std::stoi(v));
    } catch (const std::exception&) {
      std::cerr << "ignoring invalid VIEWPATH_JOBS='" << v << "'\n";
    }
  }
  return 1;
}

int cmd_run(const std::string& scenario, std::uint64_t seed, const std::string& strategy, const std::string& out,
            bool trace) {
  viewpath::ScenarioConfig cfg;
  try {
    cfg = viewpath::load_scenario(scenario);
    const auto s = viewpath::parse_strategy(strategy);
    if (!s) throw std::invalid_argument("unknown strategy '" + strategy + "' (focus|no_path|sampling)");
    cfg.strategy = *s;
    cfg.seed = seed;
    cfg.episode.trace = cfg.episode.trace || trace;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const viewpath::EpisodeLog log = viewpath::run_episode(cfg);
  viewpath::write_episode_outputs(log, out);
  if (!log.records.empty()) {
    const auto& r = log.records.back();
    std::cout << viewpath::to_string(cfg.strategy) << " seed " << seed << " (" << log.object << "): " << log.records.size()
              << " NBVs, coverage " << r.coverage << ", entropy " << r.entropy << ", travel " << r.travel_time
              << " s, planner " << log.timing.back().planner_wall << " s\n";
  }
  if (log.aborted) {
    std::cerr << "episode aborted: " << log.abort_reason << '\n';
    return kEpisodeAbort;
  }
  return kOk;
}

int cmd_sweep(const std::string& manifest_path, int jobs) {
  viewpath::RunManifest m;
  try {
    m = viewpath::load_manifest(manifest_path, jobs > 0 ? jobs : env_parallelism());
    if (jobs > 0) m.parallelism = jobs;
    viewpath::load_scenario(m.scenario).validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const viewpath::SweepReport r = viewpath::run_sweep(m, &std::cout);
  std::cout << "sweep: " << r.completed << " completed, " << r.skipped << " skipped, " << r.aborted << " aborted, "
            << r.failed << " failed in " << r.wall_time << " s\n";
  return r.aborted + r.failed > 0 ? kEpisodeAbort : kOk;
}

int cmd_analyze(const std::string& logs, const std::string& rope_path, const std::string& out, std::uint64_t seed) {
  viewpath::RopeConfig rope;
  try {
    if (!rope_path.empty()) rope = viewpath::load_rope_config(rope_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const auto results = viewpath::load_episode_results(logs);
    if (results.empty()) throw std::runtime_error("no episode logs under " + logs);
    viewpath::ChainConfig chains;
    chains.seed = seed;
    const auto comparisons = viewpath::compare_strategies(results, rope, chains);
    if (comparisons.empty()) throw std::runtime_error("need at least 5 completed episodes for two strategies");
    const std::string dir = out.empty() ? (std::filesystem::path(logs) / "analysis").string() : out;
    viewpath::write_analysis(comparisons, dir);
    for (const auto& c : comparisons)
      std::cout << viewpath::to_string(c.a) << " - " << viewpath::to_string(c.b) << " " << c.metric << ": median "
                << c.median_difference << ", HDI [" << c.hdi.lo << ", " << c.hdi.hi << "], ROPE [" << c.rope.lo << ", "
                << c.rope.hi << "] -> " << viewpath::to_string(c.verdict.kind) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return kAnalysisError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visibility-aware view path planning simulator"};
  app.require_subcommand(1);

  std::string scenario, strategy, out, manifest, logs, rope, analysis_out;
  std::uint64_t seed = 0, analysis_seed = 1;
  bool trace = false;
  int jobs = 0;

  auto* run = app.add_subcommand("run", "Run one episode");
  run->add_option("--scenario", scenario, "Scenario JSON")->required();
  run->add_option("--seed", seed, "Episode seed")->required();
  run->add_option("--strategy", strategy, "focus | no_path | sampling")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_flag("--trace", trace, "Also write per-step diagnostics.csv");

  auto* sweep = app.add_subcommand("sweep", "Run every seed x strategy pair of a manifest");
  sweep->add_option("--manifest", manifest, "Manifest JSON")->required();
  sweep->add_option("--jobs", jobs, "Parallel episodes (default: manifest, then VIEWPATH_JOBS)");

  auto* analyze = app.add_subcommand("analyze", "Bayesian comparison of strategies");
  analyze->add_option("--logs", logs, "Directory holding episode directories")->required();
  analyze->add_option("--rope", rope, "ROPE JSON");
  analyze->add_option("--out", analysis_out, "Report directory (default <logs>/analysis)");
  analyze->add_option("--seed", analysis_seed, "MCMC seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(scenario, seed, strategy, out, trace);
    if (*sweep) return cmd_sweep(manifest, jobs);
    return cmd_analyze(logs, rope, analysis_out, analysis_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEpisodeAbort;
  }
}
