#include <doctest.h>

#include <json.hpp>

#include "test_support.hpp"
#include "viewpath/reporting.hpp"

using namespace viewpath;

namespace {

std::vector<EpisodeResult> group(Strategy s, double coverage_shift) {
  std::vector<EpisodeResult> v;
  for (int i = 0; i < 10; ++i) {
    EpisodeResult r;
    r.seed = static_cast<std::uint64_t>(i);
    r.strategy = s;
    r.legs = 10;
    r.coverage = 0.70 + 0.002 * ((i * 7) % 5 - 2) + coverage_shift;
    r.entropy = 50000.0 + 40.0 * ((i * 3) % 5 - 2);
    r.max_entropy = 100000.0;
    r.total_time = 300.0 + 2.0 * ((i * 4) % 5 - 2);
    v.push_back(r);
  }
  return v;
}

std::vector<EpisodeResult> concat(std::vector<EpisodeResult> a, const std::vector<EpisodeResult>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

ChainConfig quick() {
  ChainConfig c;
  c.draws = 4000;
  c.burn_in = 2000;
  return c;
}

EpisodeLog fake_log() {
  EpisodeLog log;
  log.seed = 4;
  log.strategy = Strategy::kNoPath;
  log.scenario = "unit";
  log.object = "table";
  log.max_entropy = 1000.0;
  for (int k = 1; k <= 3; ++k) {
    NbvRecord r;
    r.step = k;
    r.nbv_id = 10 + k;
    r.orientation = "center";
    r.coverage = 0.1 * k;
    r.entropy = 900.0 - 10.0 * k;
    r.travel_time = 5.0 * k;
    r.arrived = true;
    r.min_softmin = 0.2;
    r.min_clearance = 0.3;
    log.records.push_back(r);
    log.timing.push_back({0.01 * k, 0.001 * k, 0.01});
  }
  return log;
}

}  // namespace

TEST_CASE("duplicated logs are equivalent on every metric") {
  const auto results = concat(group(Strategy::kFocus, 0.0), group(Strategy::kNoPath, 0.0));
  const auto cmp = compare_strategies(results, RopeConfig{}, quick());
  REQUIRE(cmp.size() == 3);
  for (const Comparison& c : cmp) {
    INFO(c.metric);
    CHECK(c.verdict.kind == RopeVerdict::Kind::kEquivalent);
  }
}

TEST_CASE("a coverage shift of 0.05 is distinct") {
  const auto results = concat(group(Strategy::kFocus, 0.05), group(Strategy::kNoPath, 0.0));
  const auto cmp = compare_strategies(results, RopeConfig{}, quick());
  bool seen = false;
  for (const Comparison& c : cmp) {
    if (c.metric != "coverage") continue;
    seen = true;
    CHECK(c.verdict.kind == RopeVerdict::Kind::kDistinct);
    CHECK(c.median_difference == doctest::Approx(0.05).epsilon(0.1));
  }
  CHECK(seen);
}

TEST_CASE("ROPE widths follow the configured rules") {
  const auto results = concat(group(Strategy::kFocus, 0.0), group(Strategy::kNoPath, 0.0));
  const auto cmp = compare_strategies(results, RopeConfig{}, quick());
  for (const Comparison& c : cmp) {
    if (c.metric == "coverage") CHECK(c.rope.hi == doctest::Approx(0.01));
    if (c.metric == "entropy") CHECK(c.rope.hi == doctest::Approx(1000.0));
    if (c.metric == "time") CHECK(c.rope.hi == doctest::Approx(15.0));
  }
}

TEST_CASE("small groups are skipped") {
  auto a = group(Strategy::kFocus, 0.0);
  a.resize(4);
  CHECK(compare_strategies(concat(a, group(Strategy::kNoPath, 0.0)), RopeConfig{}, quick()).empty());
}

TEST_CASE("episode outputs round trip through the loader") {
  const auto dir = testing::fresh_dir("reporting_roundtrip");
  const EpisodeLog log = fake_log();
  write_episode_outputs(log, (dir / episode_dir_name(log.strategy, log.seed)).string());
  const auto results = load_episode_results(dir.string());
  REQUIRE(results.size() == 1);
  const EpisodeResult& r = results[0];
  CHECK(r.seed == 4);
  CHECK(r.strategy == Strategy::kNoPath);
  CHECK(r.legs == 3);
  CHECK(r.coverage == doctest::Approx(0.3));
  CHECK(r.entropy == doctest::Approx(870.0));
  CHECK(r.total_time == doctest::Approx(15.0 + 0.03));
  CHECK(r.leg_overhead == doctest::Approx(0.01));

  const auto j = nlohmann::json::parse(testing::slurp(dir / episode_dir_name(log.strategy, log.seed) / "summary.json"));
  CHECK(j.at("final").at("coverage").get<double>() == doctest::Approx(0.3));
  CHECK(j.at("strategy") == "no_path");

  const std::string csv = episode_csv(log);
  CHECK(csv.substr(0, csv.find('\n')).find("step,nbv_id,orientation") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("summary means match a recomputation") {
  auto results = concat(group(Strategy::kFocus, 0.0), group(Strategy::kSampling, 0.02));
  const std::string s = sweep_summary_csv(results);
  double m = 0.0;
  for (const auto& r : results)
    if (r.strategy == Strategy::kSampling) m += r.coverage / 10.0;
  std::istringstream in(s);
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.rfind("sampling,coverage,10,", 0) != 0) continue;
    found = true;
    const double mean = std::stod(line.substr(std::string("sampling,coverage,10,").size()));
    CHECK(mean == doctest::Approx(m).epsilon(1e-9));
  }
  CHECK(found);
}

TEST_CASE("manifest parsing") {
  const auto dir = testing::fresh_dir("manifest");
  {
    std::ofstream(dir / "m.json") << R"({"scenario": "s.json", "seeds": {"first": 3, "count": 4},
      "strategies": ["focus", "sampling"], "out": "runs", "parallelism": 2})";
  }
  const RunManifest m = load_manifest((dir / "m.json").string(), 1);
  CHECK(m.seeds == std::vector<std::uint64_t>{3, 4, 5, 6});
  CHECK(m.strategies.size() == 2);
  CHECK(m.parallelism == 2);
  CHECK(std::filesystem::path(m.scenario) == dir / "s.json");
  CHECK(std::filesystem::path(m.out_dir) == dir / "runs");

  { std::ofstream(dir / "bad.json") << R"({"scenario": "s.json", "seeds": [], "strategies": ["focus"]})"; }
  CHECK_THROWS_AS(load_manifest((dir / "bad.json").string()), std::invalid_argument);
  { std::ofstream(dir / "bad2.json") << R"({"scenario": "s.json", "seeds": [1], "strategies": ["warp"]})"; }
  CHECK_THROWS_AS(load_manifest((dir / "bad2.json").string()), std::invalid_argument);
}

TEST_CASE("analysis files are written") {
  const auto dir = testing::fresh_dir("analysis_out");
  const auto cmp = compare_strategies(concat(group(Strategy::kFocus, 0.0), group(Strategy::kNoPath, 0.0)),
                                      RopeConfig{}, quick());
  write_analysis(cmp, dir.string(), 20);
  CHECK(std::filesystem::exists(dir / "report.json"));
  const std::string h = testing::slurp(dir / "focus_vs_no_path_coverage.csv");
  CHECK(h.rfind("bin_lo,bin_hi,count\n", 0) == 0);
  CHECK(std::count(h.begin(), h.end(), '\n') == 21);
}
