#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "viewpath/voxel_world.hpp"

namespace viewpath {

using Rng = std::mt19937_64;

struct RrtParams {
  double step = 0.3;
  double neighbor_radius = 0.9;
  int max_iters = 2000;
  double goal_tolerance = 0.15;
  double goal_bias = 0.05;
  double inflation = 0.25;  // robot footprint radius
  Vec2 bounds_min = Vec2(-3.75, -3.75);
  Vec2 bounds_max = Vec2(3.75, 3.75);
};

/// RRT* tree in the plane. `path` lists node ids from the root to the goal
/// node; `waypoints` is the corresponding polyline ending exactly at the goal.
struct RrtTree {
  std::vector<Vec2> nodes;
  std::vector<int> parent;
  std::vector<double> cost;
  int goal_node = -1;
  std::vector<int> path;
  std::vector<Vec2> waypoints;
  bool reached = false;
  std::size_t work = 0;  // collision checks performed

  double path_cost() const;
};

/// True when the segment keeps `inflation` clearance from every circle.
bool segment_free(const Vec2& a, const Vec2& b, const std::vector<Circle>& circles, double inflation);

/// When start or goal lies in collision, or the goal region is not reached,
/// the tree has reached = false and waypoints = {start, goal}.
RrtTree build_rrt_star(const Vec2& start, const Vec2& goal, const std::vector<Circle>& obstacles,
                       const Circle& forbidden, const RrtParams& params, Rng& rng);

struct LocalView {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;    // offset from facing the search-space axis
  double pitch = 0.0;  // positive looks up
  Vec3 direction = Vec3::UnitX();
  double score = 0.0;

  Pose pose() const { return {look_rotation(direction), position}; }
};

/// Unit direction from `position` toward the axis point at the same height,
/// rotated by yaw about +z and pitched by `pitch`.
Vec3 view_direction(const Vec3& position, const Vec2& cylinder_center, double yaw, double pitch);

struct SamplingParams {
  RrtParams rrt;
  double sphere_radius = 0.5;
  int views_per_node = 10;
  double max_offset = kPi / 6.0;
  double min_height = 0.2;
  double max_height = 0.7;
  FieldOfView fov;
  int rays_w = 32;
  int rays_h = 24;
  double d_max = 4.5;
  int max_rejections = 1000;
};

/// Uniform positions in the node-centred ball (rejection sampling), kept
/// within [min_height, max_height] and outside the inflated obstacles.
std::vector<LocalView> sample_views_around_node(const Vec3& node, double sphere_radius, int count,
                                                const Vec2& cylinder_center,
                                                const std::vector<Circle>& keep_out,
                                                const SamplingParams& params, Rng& rng);

/// Sum of ray information over the scoring ray grid inside the camera FoV.
double evaluate_view_entropy(const OccupancyMap& map, const Pose& view, const FieldOfView& fov,
                             int rays_w, int rays_h, double d_max, std::size_t* work = nullptr);

/// Waypoint cursor along one leg's shortest path.
struct SamplingLeg {
  std::vector<Vec3> path;  // camera positions; the last one is the NBV
  Vec3 nbv_direction = Vec3::UnitX();
  std::size_t cursor = 1;  // next node to visit
};

/// Picks the closest path node ahead of the camera (nodes within the sphere
/// radius are skipped), samples views around it and returns the best one.
/// Returns the NBV itself once the cursor reaches the end of the path.
/// `is_final` reports the latter case.
LocalView next_local_target(SamplingLeg& leg, const OccupancyMap& map,
                            const Vec3& current_position, const Vec2& cylinder_center,
                            const std::vector<Circle>& keep_out, const SamplingParams& params,
                            Rng& rng, bool* is_final = nullptr, std::size_t* work = nullptr);

}  // namespace viewpath
