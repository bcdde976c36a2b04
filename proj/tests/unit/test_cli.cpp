#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(VIEWPATH_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string tiny() { return testing::source_path("tests/data/tiny_scenario.json"); }

}  // namespace

TEST_CASE("run writes the episode files and is reproducible") {
  const auto dir = testing::fresh_dir("cli_run");
  REQUIRE(run("run --scenario " + tiny() + " --seed 1 --strategy no_path --out " + (dir / "a").string()) == 0);
  REQUIRE(run("run --scenario " + tiny() + " --seed 1 --strategy no_path --out " + (dir / "b").string()) == 0);
  for (const char* f : {"episode.csv", "timing.csv", "focus_trace.csv", "summary.json"})
    CHECK(fs::exists(dir / "a" / f));
  const std::string a = testing::slurp(dir / "a" / "episode.csv");
  CHECK(a == testing::slurp(dir / "b" / "episode.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 4);  // header + 3 NBV rows
}

TEST_CASE("usage and config errors exit with 2") {
  const auto dir = testing::fresh_dir("cli_errors");
  CHECK(run("run --scenario " + tiny() + " --seed 1 --strategy teleport --out " + dir.string()) == 2);
  CHECK(run("run --scenario /nonexistent.json --seed 1 --strategy focus --out " + dir.string()) == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("sweep --manifest /nonexistent.json") == 2);
}

TEST_CASE("analyze on an empty directory exits with 4") {
  const auto dir = testing::fresh_dir("cli_empty");
  CHECK(run("analyze --logs " + dir.string()) == 4);
}

TEST_CASE("sweep produces one directory per pair, a summary, and resumes") {
  const auto dir = testing::fresh_dir("cli_sweep");
  {
    std::ofstream(dir / "manifest.json") << "{\"scenario\": \"" << tiny()
                                         << "\", \"seeds\": [0, 1], \"strategies\": [\"focus\", \"no_path\", "
                                            "\"sampling\"], \"out\": \"runs\"}";
  }
  REQUIRE(run("sweep --manifest " + (dir / "manifest.json").string() + " --jobs 2") == 0);
  int episodes = 0;
  for (const auto& e : fs::directory_iterator(dir / "runs"))
    if (e.is_directory() && fs::exists(e.path() / "summary.json")) ++episodes;
  CHECK(episodes == 6);
  CHECK(fs::exists(dir / "runs" / "summary.csv"));

  // Resume: a deleted episode is redone, the others are left untouched.
  const auto kept = fs::last_write_time(dir / "runs" / "focus_seed0" / "episode.csv");
  const std::string before = testing::slurp(dir / "runs" / "sampling_seed1" / "episode.csv");
  fs::remove_all(dir / "runs" / "sampling_seed1");
  REQUIRE(run("sweep --manifest " + (dir / "manifest.json").string()) == 0);
  CHECK(fs::last_write_time(dir / "runs" / "focus_seed0" / "episode.csv") == kept);
  CHECK(testing::slurp(dir / "runs" / "sampling_seed1" / "episode.csv") == before);

  // Two seeds per group is below the analysis minimum.
  CHECK(run("analyze --logs " + (dir / "runs").string()) == 4);
}
