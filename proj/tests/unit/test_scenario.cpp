#include <doctest.h>

#include <set>

#include "test_support.hpp"
#include "viewpath/episode.hpp"
#include "viewpath/reporting.hpp"
#include "viewpath/scenario.hpp"

using namespace viewpath;

namespace {

ScenarioConfig tiny(Strategy s, std::uint64_t seed, int obstacles) {
  ScenarioConfig c = load_scenario(testing::source_path("tests/data/tiny_scenario.json"));
  c.strategy = s;
  c.seed = seed;
  c.obstacles.count = obstacles;
  return c;
}

}  // namespace

TEST_CASE("strategy names round trip") {
  for (Strategy s : {Strategy::kFocus, Strategy::kNoPath, Strategy::kSampling})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK_FALSE(parse_strategy("random").has_value());
}

TEST_CASE("desk suite has ten distinct non-empty objects") {
  const auto suite = desk_suite();
  CHECK(suite.size() == 10);
  std::set<std::string> names;
  for (const ObjectSpec& o : suite) {
    names.insert(o.name);
    CHECK_FALSE(o.primitives.empty());
    CHECK(o.bounds().min.z() >= 0.0);
    CHECK(o.footprint_radius() > 0.0);
  }
  CHECK(names.size() == 10);
}

TEST_CASE("obstacle layouts honour clearance and radii") {
  ObstacleParams p;
  const Circle forbidden{Vec2::Zero(), 1.0};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng = make_rng(seed, 1);
    const ObstacleLayout l = generate_obstacles(p, forbidden, 0.25, 2.0, rng);
    REQUIRE(l.circles.size() == l.group.size());
    for (std::size_t i = 0; i < l.circles.size(); ++i) {
      CHECK(l.circles[i].radius >= 0.1);
      CHECK(l.circles[i].radius <= 0.3);
      for (std::size_t j = i + 1; j < l.circles.size(); ++j) {
        if (l.group[i] == l.group[j]) continue;
        const double gap = (l.circles[i].center - l.circles[j].center).norm() - l.circles[i].radius -
                           l.circles[j].radius;
        CHECK(gap > 2 * 0.25);
      }
    }
    Rng again = make_rng(seed, 1);
    const ObstacleLayout l2 = generate_obstacles(p, forbidden, 0.25, 2.0, again);
    REQUIRE(l2.circles.size() == l.circles.size());
    for (std::size_t i = 0; i < l.circles.size(); ++i) CHECK(l2.circles[i].center == l.circles[i].center);
  }
}

TEST_CASE("scenario file errors are reported") {
  CHECK_THROWS_AS(parse_scenario("{ not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario(R"({"strategy": "teleport"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario(R"({"resolution": -1})"), std::invalid_argument);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), std::invalid_argument);
  const ScenarioConfig c = parse_scenario(R"({"n_nbv": 4, "controller": {"alpha": 7}})");
  CHECK(c.n_nbv == 4);
  CHECK(c.controller.alpha == 7.0);
  CHECK(c.objects.size() == 10);
}

TEST_CASE("shipped desk scenario loads") {
  const ScenarioConfig c = load_scenario(testing::source_path("config/scenario_desk.json"));
  CHECK(c.n_nbv == 10);
  CHECK(c.resolution == 0.03);
  CHECK(c.obstacles.count == 10);
}

TEST_CASE("no_path on an empty world reaches every view") {
  const EpisodeLog log = run_episode(tiny(Strategy::kNoPath, 0, 0));
  REQUIRE(log.complete());
  REQUIRE(log.records.size() == 3);
  double last_cov = log.initial_coverage;
  double last_ent = log.initial_entropy;
  for (const NbvRecord& r : log.records) {
    CHECK(r.arrived);
    CHECK(r.coverage >= last_cov);
    CHECK(r.entropy <= last_ent + 0.694);
    CHECK(r.penetrations == 0);
    last_cov = r.coverage;
    last_ent = r.entropy;
  }
}

TEST_CASE("episodes are deterministic for every strategy") {
  for (Strategy s : {Strategy::kFocus, Strategy::kNoPath, Strategy::kSampling}) {
    const EpisodeLog a = run_episode(tiny(s, 3, 2));
    const EpisodeLog b = run_episode(tiny(s, 3, 2));
    CHECK(episode_csv(a) == episode_csv(b));
    CHECK(focus_trace_csv(a) == focus_trace_csv(b));
    CHECK(a.records.size() == 3);
  }
}

TEST_CASE("controller parameters do not depend on the strategy") {
  const ScenarioConfig a = tiny(Strategy::kFocus, 1, 2);
  const ScenarioConfig b = tiny(Strategy::kSampling, 1, 2);
  CHECK(a.controller.alpha == b.controller.alpha);
  CHECK(a.controller.lambda == b.controller.lambda);
  CHECK(a.controller.d_th == b.controller.d_th);
}
