#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "viewpath/controller.hpp"
#include "viewpath/focus_point.hpp"
#include "viewpath/kinematics.hpp"
#include "viewpath/nbv_selection.hpp"
#include "viewpath/sampling_baseline.hpp"
#include "viewpath/voxel_world.hpp"

namespace viewpath {

enum class Strategy { kFocus, kNoPath, kSampling };

std::string to_string(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& name);

/// Solid primitive used to build ground-truth objects. Cylinders may be
/// hollow (inner_radius > 0); prisms extrude a simple polygon along z.
struct Primitive {
  enum class Kind { kBox, kCylinder, kPrism };
  Kind kind = Kind::kBox;
  Vec3 min = Vec3::Zero();  // box
  Vec3 max = Vec3::Zero();
  Vec2 center = Vec2::Zero();  // cylinder
  double radius = 0.0;
  double inner_radius = 0.0;
  std::vector<Vec2> polygon;  // prism
  double z0 = 0.0;            // cylinder, prism
  double z1 = 0.0;

  bool contains(const Vec3& p) const;
  Aabb bounds() const;
};

struct ObjectSpec {
  std::string name;
  std::vector<Primitive> primitives;

  bool contains(const Vec3& p) const;
  Aabb bounds() const;
  /// Largest horizontal distance from (0, 0) to any primitive bound corner.
  double footprint_radius() const;
};

/// Ten procedurally built desk-scale objects centred at the origin.
std::vector<ObjectSpec> desk_suite();

struct ObstacleParams {
  int count = 10;
  double radius_min = 0.1;
  double radius_max = 0.3;
  /// Obstacle centres stay this far (plus their radius) from the candidate
  /// ring so every candidate view remains reachable.
  double ring_clearance = 0.5;
  int max_attempts = 5000;
};

struct EpisodeParams {
  double dt = 0.02;
  int scan_every = 5;
  int sensor_width = 64;
  int sensor_height = 48;
  double d_max = 4.5;
  double arrival_position = 0.05;
  double arrival_angle_deg = 5.0;
  double leg_timeout = 120.0;
  double waypoint_position = 0.1;
  double waypoint_angle_deg = 10.0;
  double waypoint_timeout = 10.0;
  int infeasible_abort = 100;
  double coverage_epsilon = 0.008;
  int nbv_threads = 1;
  /// Per-step diagnostics trace in the run output.
  bool trace = false;
};

struct ScenarioConfig {
  std::string name = "desk";
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::kFocus;
  std::vector<ObjectSpec> objects;  // suite; object = objects[seed % size] unless object_index set
  int object_index = -1;
  double resolution = 0.03;
  Vec3 box_size = Vec3(5.5, 5.5, 4.0);
  double world_half_extent = 3.75;
  double world_height = 4.0;
  double forbidden_margin = 0.45;
  int n_nbv = 10;
  ObstacleParams obstacles;
  RobotModel robot = RobotModel::youbot_like();
  ControlParams controller;
  FocusParams focus;
  SamplingParams sampling;
  OccupancyParams occupancy;
  RsvParams rsv;
  CandidateSpace candidates;
  EpisodeParams episode;

  const ObjectSpec& object() const;
  void validate() const;
};

/// Scenario file (JSON). Relative paths (robot model) resolve against the
/// file's directory. Throws std::invalid_argument on schema errors.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir = ".");

/// Independent, reproducible random stream per (seed, purpose).
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

struct ObstacleLayout {
  std::vector<Circle> circles;
  std::vector<int> group;  // group id per circle; walls share their anchor's id
  int groups = 0;
  int wall_circles = 0;
  int failed_placements = 0;
};

/// Places `count` obstacle groups with surface clearance above the robot
/// diameter. A circle closer than that to the forbidden cylinder grows a wall
/// of touching circles toward it.
ObstacleLayout generate_obstacles(const ObstacleParams& params, const Circle& forbidden,
                                  double footprint_radius, double candidate_radius, Rng& rng);

struct World {
  GroundTruthScene scene;
  ObjectSpec object;
  ObstacleLayout layout;
  std::vector<Vec3> reference_cloud;  // surface voxel centres
};

World build_world(const ScenarioConfig& config);

/// Arm posture with the camera level and looking along the base x axis at
/// roughly `camera_height`; base placed so the camera sits at `view`.
Configuration start_configuration(const RobotModel& model, const CandidateView& view);

}  // namespace viewpath
