#include "viewpath/reporting.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace viewpath {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Header-indexed rows of a simple comma-separated file (no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("missing CSV column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
  double last(const std::string& name) const { return std::stod(rows.back().at(column(name))); }
};

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string episode_csv(const EpisodeLog& log) {
  std::ostringstream o;
  o << "step,nbv_id,orientation,score,arrived,coverage,entropy,travel_time,planner_work,control_steps,"
       "scans,focus_recomputes,waypoints,infeasible_steps,vfi_violations,penetrations,visibility_steps,"
       "visibility_ok,min_softmin,min_clearance\n";
  for (const NbvRecord& r : log.records) {
    o << r.step << ',' << r.nbv_id << ',' << r.orientation << ',' << num(r.score) << ',' << (r.arrived ? 1 : 0)
      << ',' << num(r.coverage) << ',' << num(r.entropy) << ',' << num(r.travel_time) << ',' << r.planner_work
      << ',' << r.control_steps << ',' << r.scans << ',' << r.focus_recomputes << ',' << r.waypoints << ','
      << r.infeasible_steps << ',' << r.vfi_violations << ',' << r.penetrations << ',' << r.visibility_steps
      << ',' << r.visibility_ok << ',' << num(r.min_softmin) << ',' << num(r.min_clearance) << '\n';
  }
  return o.str();
}

std::string timing_csv(const EpisodeLog& log) {
  std::ostringstream o;
  o << "step,planner_wall,leg_planner_wall,nbv_wall,total_time\n";
  for (std::size_t i = 0; i < log.timing.size(); ++i) {
    const NbvTiming& t = log.timing[i];
    const double travel = i < log.records.size() ? log.records[i].travel_time : 0.0;
    o << (i + 1) << ',' << num(t.planner_wall) << ',' << num(t.leg_planner_wall) << ',' << num(t.nbv_wall)
      << ',' << num(travel + t.planner_wall) << '\n';
  }
  return o.str();
}

std::string trace_csv(const EpisodeLog& log) {
  std::ostringstream o;
  o << "t,position_error,angle_error,softmin,min_visibility,lambda_kappa,status\n";
  for (const TraceRow& r : log.trace)
    o << num(r.t) << ',' << num(r.position_error) << ',' << num(r.angle_error) << ',' << num(r.softmin) << ','
      << num(r.min_visibility) << ',' << num(r.lambda_kappa) << ',' << to_string(r.status) << '\n';
  return o.str();
}

std::string focus_trace_csv(const EpisodeLog& log) {
  std::ostringstream o;
  o << "step,anchor_x,anchor_y,anchor_z,point_x,point_y,point_z,gain\n";
  for (const FocusTraceRow& r : log.focus_trace)
    o << r.control_step << ',' << num(r.anchor.x()) << ',' << num(r.anchor.y()) << ',' << num(r.anchor.z()) << ','
      << num(r.point.x()) << ',' << num(r.point.y()) << ',' << num(r.point.z()) << ',' << num(r.gain) << '\n';
  return o.str();
}

std::string summary_json(const EpisodeLog& log) {
  json j;
  j["seed"] = log.seed;
  j["strategy"] = to_string(log.strategy);
  j["scenario"] = log.scenario;
  j["object"] = log.object;
  j["aborted"] = log.aborted;
  j["abort_reason"] = log.abort_reason;
  j["obstacle_groups"] = log.obstacle_groups;
  j["wall_circles"] = log.wall_circles;
  j["failed_placements"] = log.failed_placements;
  j["reference_points"] = log.reference_points;
  j["max_entropy"] = log.max_entropy;
  j["initial_entropy"] = log.initial_entropy;
  j["initial_coverage"] = log.initial_coverage;
  j["rrt_fallbacks"] = log.rrt_fallbacks;
  j["nbv_steps"] = log.records.size();
  j["wall_time"] = log.wall_time;
  if (!log.records.empty()) {
    const NbvRecord& r = log.records.back();
    const NbvTiming& t = log.timing.back();
    j["final"] = {{"coverage", r.coverage},
                  {"entropy", r.entropy},
                  {"travel_time", r.travel_time},
                  {"planner_wall", t.planner_wall},
                  {"nbv_wall", t.nbv_wall},
                  {"total_time", r.travel_time + t.planner_wall},
                  {"planner_work", r.planner_work},
                  {"arrivals", std::count_if(log.records.begin(), log.records.end(),
                                             [](const NbvRecord& x) { return x.arrived; })},
                  {"vfi_violations", r.vfi_violations},
                  {"penetrations", r.penetrations},
                  {"min_softmin", r.min_softmin},
                  {"min_clearance", r.min_clearance},
                  {"visibility_steps", r.visibility_steps},
                  {"visibility_ok", r.visibility_ok},
                  {"infeasible_steps", r.infeasible_steps}};
  }
  return j.dump(2) + "\n";
}

void write_episode_outputs(const EpisodeLog& log, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path d(dir);
  write_file(d / "episode.csv", episode_csv(log));
  write_file(d / "timing.csv", timing_csv(log));
  write_file(d / "focus_trace.csv", focus_trace_csv(log));
  if (!log.trace.empty()) write_file(d / "diagnostics.csv", trace_csv(log));
  write_file(d / "summary.json", summary_json(log));
}

RunManifest load_manifest(const std::string& path, int default_parallelism) {
  RunManifest m;
  m.parallelism = std::max(1, default_parallelism);
  try {
    const json j = json::parse(read_file(path));
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
      const fs::path fp(p);
      return (fp.is_relative() ? base / fp : fp).string();
    };
    m.scenario = resolve(j.at("scenario").get<std::string>());
    if (j.at("seeds").is_object()) {
      const auto first = j.at("seeds").at("first").get<std::uint64_t>();
      const auto count = j.at("seeds").at("count").get<std::uint64_t>();
      for (std::uint64_t s = 0; s < count; ++s) m.seeds.push_back(first + s);
    } else {
      m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    }
    for (const auto& s : j.at("strategies")) {
      const auto st = parse_strategy(s.get<std::string>());
      if (!st) throw std::invalid_argument("unknown strategy '" + s.get<std::string>() + "'");
      m.strategies.push_back(*st);
    }
    m.out_dir = resolve(j.at("out").get<std::string>());
    if (j.contains("parallelism")) m.parallelism = std::max(1, j.at("parallelism").get<int>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("manifest: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  if (m.seeds.empty() || m.strategies.empty())
    throw std::invalid_argument("manifest needs at least one seed and one strategy");
  return m;
}

std::string episode_dir_name(Strategy s, std::uint64_t seed) {
  return to_string(s) + "_seed" + std::to_string(seed);
}

SweepReport run_sweep(const RunManifest& manifest, std::ostream* progress) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig base = load_scenario(manifest.scenario);
  fs::create_directories(manifest.out_dir);

  struct Job {
    std::uint64_t seed;
    Strategy strategy;
  };
  std::vector<Job> jobs;
  SweepReport report;
  for (std::uint64_t seed : manifest.seeds)
    for (Strategy s : manifest.strategies) {
      if (fs::exists(fs::path(manifest.out_dir) / episode_dir_name(s, seed) / "summary.json"))
        ++report.skipped;
      else
        jobs.push_back({seed, s});
    }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      ScenarioConfig cfg = base;
      cfg.seed = job.seed;
      cfg.strategy = job.strategy;
      const std::string dir = (fs::path(manifest.out_dir) / episode_dir_name(job.strategy, job.seed)).string();
      std::string line;
      try {
        const EpisodeLog log = run_episode(cfg);
        write_episode_outputs(log, dir);
        std::lock_guard lock(mu);
        if (log.aborted)
          ++report.aborted;
        else
          ++report.completed;
        line = episode_dir_name(job.strategy, job.seed) + (log.aborted ? " aborted: " + log.abort_reason : " done") +
               " (" + num(log.wall_time) + " s)";
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        ++report.failed;
        line = episode_dir_name(job.strategy, job.seed) + " failed: " + e.what();
      }
      if (progress) {
        std::lock_guard lock(mu);
        *progress << line << std::endl;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(manifest.parallelism, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  write_file(fs::path(manifest.out_dir) / "summary.csv", sweep_summary_csv(load_episode_results(manifest.out_dir)));
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::vector<EpisodeResult> load_episode_results(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<fs::path> dirs;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "summary.json") dirs.push_back(e.path().parent_path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<EpisodeResult> out;
  for (const fs::path& d : dirs) {
    const json j = json::parse(read_file(d / "summary.json"));
    EpisodeResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto s = parse_strategy(j.at("strategy").get<std::string>());
    if (!s) throw std::runtime_error("unknown strategy in " + (d / "summary.json").string());
    r.strategy = *s;
    r.object = j.value("object", "");
    r.aborted = j.value("aborted", false);
    r.max_entropy = j.value("max_entropy", 0.0);
    const CsvTable ep = read_csv(d / "episode.csv");
    const CsvTable tm = read_csv(d / "timing.csv");
    r.legs = static_cast<int>(ep.rows.size());
    if (!ep.rows.empty()) {
      r.coverage = ep.last("coverage");
      r.entropy = ep.last("entropy");
      r.travel_time = ep.last("travel_time");
      r.vfi_violations = static_cast<int>(ep.last("vfi_violations"));
      r.penetrations = static_cast<int>(ep.last("penetrations"));
      r.min_softmin = ep.last("min_softmin");
      r.min_clearance = ep.last("min_clearance");
      r.visibility_steps = static_cast<int>(ep.last("visibility_steps"));
      r.visibility_ok = static_cast<int>(ep.last("visibility_ok"));
    }
    if (!tm.rows.empty()) r.planner_wall = tm.last("planner_wall");
    r.total_time = r.travel_time + r.planner_wall;
    r.leg_overhead = r.legs > 0 ? r.planner_wall / r.legs : 0.0;
    out.push_back(r);
  }
  return out;
}

std::string sweep_summary_csv(const std::vector<EpisodeResult>& results) {
  std::ostringstream o;
  o << "strategy,metric,n,mean,sd\n";
  for (Strategy s : {Strategy::kFocus, Strategy::kNoPath, Strategy::kSampling}) {
    std::map<std::string, std::vector<double>> cols;
    for (const EpisodeResult& r : results) {
      if (r.strategy != s || r.legs == 0) continue;
      cols["coverage"].push_back(r.coverage);
      cols["entropy"].push_back(r.entropy);
      cols["travel_time"].push_back(r.travel_time);
      cols["planner_wall"].push_back(r.planner_wall);
      cols["total_time"].push_back(r.total_time);
      cols["leg_overhead"].push_back(r.leg_overhead);
    }
    if (cols.empty()) continue;
    for (const char* m : {"coverage", "entropy", "travel_time", "planner_wall", "total_time", "leg_overhead"}) {
      const auto& v = cols[m];
      o << to_string(s) << ',' << m << ',' << v.size() << ',' << num(mean_of(v)) << ',' << num(sd_of(v)) << '\n';
    }
  }
  return o.str();
}

RopeConfig load_rope_config(const std::string& path) {
  RopeConfig r;
  try {
    const json j = json::parse(read_file(path));
    if (j.contains("coverage")) {
      const auto v = j.at("coverage").get<std::vector<double>>();
      if (v.size() != 2 || v[0] > v[1]) throw std::invalid_argument("coverage ROPE must be [lo, hi]");
      r.coverage = {v[0], v[1]};
    }
    if (j.contains("entropy_fraction_of_max")) r.entropy_fraction_of_max = j.at("entropy_fraction_of_max").get<double>();
    if (j.contains("time_fraction_of_reference"))
      r.time_fraction_of_reference = j.at("time_fraction_of_reference").get<double>();
    if (j.contains("time_reference")) {
      const auto s = parse_strategy(j.at("time_reference").get<std::string>());
      if (!s) throw std::invalid_argument("unknown time_reference strategy");
      r.time_reference = *s;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("rope config: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  return r;
}

std::vector<Comparison> compare_strategies(const std::vector<EpisodeResult>& results,
                                           const RopeConfig& rope, const ChainConfig& chains) {
  std::map<Strategy, std::vector<const EpisodeResult*>> by;
  std::vector<double> max_entropy;
  for (const EpisodeResult& r : results) {
    if (r.aborted || r.legs == 0) continue;
    by[r.strategy].push_back(&r);
    max_entropy.push_back(r.max_entropy);
  }
  const double entropy_half = rope.entropy_fraction_of_max * mean_of(max_entropy);
  std::vector<double> ref_time;
  for (const EpisodeResult* r : by[rope.time_reference]) ref_time.push_back(r->total_time);
  if (ref_time.empty())
    for (const auto& [s, v] : by)
      for (const EpisodeResult* r : v) ref_time.push_back(r->total_time);
  const double time_half = rope.time_fraction_of_reference * mean_of(ref_time);

  const std::pair<Strategy, Strategy> pairs[] = {{Strategy::kFocus, Strategy::kNoPath},
                                                 {Strategy::kSampling, Strategy::kNoPath},
                                                 {Strategy::kFocus, Strategy::kSampling}};
  std::vector<Comparison> out;
  std::uint64_t stream = 0;
  for (const auto& [sa, sb] : pairs) {
    const auto& ga = by[sa];
    const auto& gb = by[sb];
    if (ga.size() < 5 || gb.size() < 5) continue;
    for (const char* metric : {"coverage", "entropy", "time"}) {
      auto value = [&](const EpisodeResult* r) {
        const std::string m = metric;
        return m == "coverage" ? r->coverage : m == "entropy" ? r->entropy : r->total_time;
      };
      std::vector<double> a, b;
      for (const EpisodeResult* r : ga) a.push_back(value(r));
      for (const EpisodeResult* r : gb) b.push_back(value(r));
      ChainConfig cc = chains;
      cc.seed = chains.seed + 7919 * ++stream;
      const PosteriorSamples post = fit_t_model(a, b, cc);
      Comparison c;
      c.a = sa;
      c.b = sb;
      c.metric = metric;
      c.n_a = a.size();
      c.n_b = b.size();
      c.mean_a = mean_of(a);
      c.mean_b = mean_of(b);
      c.difference_draws = post.difference();
      c.median_difference = median(c.difference_draws);
      c.hdi = hdi(c.difference_draws, 0.95);
      const std::string m = metric;
      c.rope = m == "coverage" ? rope.coverage
               : m == "entropy" ? Interval{-entropy_half, entropy_half}
                                : Interval{-time_half, time_half};
      c.verdict = rope_decision(c.hdi, c.rope);
      c.acceptance = post.acceptance;
      out.push_back(std::move(c));
    }
  }
  return out;
}

void write_analysis(const std::vector<Comparison>& comparisons, const std::string& out_dir, int bins) {
  fs::create_directories(out_dir);
  json report = json::array();
  for (const Comparison& c : comparisons) {
    const std::string name = to_string(c.a) + "_vs_" + to_string(c.b) + "_" + c.metric;
    report.push_back({{"a", to_string(c.a)},
                      {"b", to_string(c.b)},
                      {"metric", c.metric},
                      {"n_a", c.n_a},
                      {"n_b", c.n_b},
                      {"mean_a", c.mean_a},
                      {"mean_b", c.mean_b},
                      {"median_difference", c.median_difference},
                      {"hdi95", {c.hdi.lo, c.hdi.hi}},
                      {"rope", {c.rope.lo, c.rope.hi}},
                      {"verdict", to_string(c.verdict.kind)},
                      {"rope_overlap", c.verdict.overlap},
                      {"acceptance", c.acceptance},
                      {"histogram", name + ".csv"}});

    std::ostringstream h;
    h << "bin_lo,bin_hi,count\n";
    if (!c.difference_draws.empty()) {
      const auto [lo_it, hi_it] = std::minmax_element(c.difference_draws.begin(), c.difference_draws.end());
      const double lo = *lo_it;
      const double width = std::max((*hi_it - lo) / bins, 1e-12);
      std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
      for (double d : c.difference_draws)
        ++counts[std::min<std::size_t>(static_cast<std::size_t>((d - lo) / width), counts.size() - 1)];
      for (int i = 0; i < bins; ++i)
        h << num(lo + i * width) << ',' << num(lo + (i + 1) * width) << ',' << counts[static_cast<std::size_t>(i)] << '\n';
    }
    write_file(fs::path(out_dir) / (name + ".csv"), h.str());
  }
  write_file(fs::path(out_dir) / "report.json", report.dump(2) + "\n");
}

}  // namespace viewpath
