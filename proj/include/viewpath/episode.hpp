#pragma once

#include <string>
#include <vector>

#include "viewpath/scenario.hpp"

namespace viewpath {

/// Metrics recorded when an NBV leg ends (arrival or timeout). Counters and
/// times are cumulative over the episode.
struct NbvRecord {
  int step = 0;
  int nbv_id = -1;
  std::string orientation;
  double score = 0.0;
  bool arrived = false;
  double coverage = 0.0;
  double entropy = 0.0;
  double travel_time = 0.0;        // simulated seconds
  std::size_t planner_work = 0;    // strategy voxel visits + collision checks
  int control_steps = 0;
  int scans = 0;
  int focus_recomputes = 0;
  int waypoints = 0;
  int infeasible_steps = 0;
  int vfi_violations = 0;          // steps with softmin distance < -1e-3
  int penetrations = 0;            // steps with true clearance < 0
  int visibility_steps = 0;        // focus steps with position error > 0.5 m
  int visibility_ok = 0;           // ... of which all margins >= -1e-3
  double min_softmin = 0.0;
  double min_clearance = 0.0;
};

/// Wall-clock companion of NbvRecord; not part of the deterministic log.
struct NbvTiming {
  double planner_wall = 0.0;  // cumulative strategy overhead, s
  double nbv_wall = 0.0;      // cumulative NBV selection, s
  double leg_planner_wall = 0.0;
};

struct TraceRow {
  double t = 0.0;
  double position_error = 0.0;
  double angle_error = 0.0;
  double softmin = 0.0;
  double min_visibility = 0.0;
  double lambda_kappa = 0.0;
  QpStatus status = QpStatus::kOptimal;
};

struct FocusTraceRow {
  int control_step = 0;
  Vec3 anchor = Vec3::Zero();
  Vec3 point = Vec3::Zero();
  double gain = 0.0;
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::kFocus;
  std::string scenario;
  std::string object;
  int obstacle_groups = 0;
  int wall_circles = 0;
  int failed_placements = 0;
  std::size_t reference_points = 0;
  double max_entropy = 0.0;
  double initial_entropy = 0.0;
  double initial_coverage = 0.0;
  int rrt_fallbacks = 0;
  bool aborted = false;
  std::string abort_reason;

  std::vector<NbvRecord> records;
  std::vector<NbvTiming> timing;
  std::vector<TraceRow> trace;
  std::vector<FocusTraceRow> focus_trace;
  double wall_time = 0.0;

  bool complete() const { return !aborted; }
};

/// Runs one episode; a pure function of the configuration apart from the
/// wall-clock fields.
EpisodeLog run_episode(const ScenarioConfig& config);

}  // namespace viewpath
