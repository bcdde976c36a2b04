#pragma once

#include <optional>
#include <vector>

#include "viewpath/voxel_world.hpp"

namespace viewpath {

struct FocusParams {
  double fov_horizontal_deg = 90.0;
  double fov_vertical_deg = 90.0;
  int grid = 16;                   // K x K rays
  double focus_distance = 2.5;     // d_f
  double max_dist = 4.5;
  double recompute_threshold = 0.3;
  /// When false the focus FoV axis is kept horizontal.
  bool aim_at_object_center_height = true;
};

/// Informative focus point p_f and the camera position it was computed at.
struct FocusState {
  Vec3 point = Vec3::Zero();
  Vec3 anchor = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  double best_ray_gain = 0.0;
};

struct BestRay {
  std::size_t index = 0;
  Vec3 direction = Vec3::UnitX();
  double gain = 0.0;
};

/// K^2 unit rays spanning the focus pyramid around the axis from
/// `camera_position` to `target`. Throws std::invalid_argument when the two
/// points coincide.
std::vector<Vec3> generate_focus_rays(const Vec3& camera_position, const Vec3& target,
                                      double fov_h_deg, double fov_v_deg, int grid);

/// Aim point of the focus FoV: the cylinder axis, at the object's bounding-box centre
/// height or at the camera height.
Vec3 focus_target(const Vec3& camera_position, const Vec2& cylinder_center, double aim_z,
                  bool aim_at_object_center_height);

/// Argmax ray information gain; ties go to the lowest index.
/// `work` (optional) accumulates the number of voxels visited.
BestRay best_ray(const OccupancyMap& map, const std::vector<Vec3>& rays, const Vec3& origin,
                 double max_dist, std::size_t* work = nullptr);

/// Recomputes the focus point when there is no prior state or the camera has
/// moved more than the threshold from the anchor; otherwise returns `state`.
FocusState update_focus(const std::optional<FocusState>& state, const Vec3& camera_position,
                        const OccupancyMap& map, const Vec2& cylinder_center, double aim_z,
                        const FocusParams& params, bool* recomputed = nullptr,
                        std::size_t* work = nullptr);

}  // namespace viewpath
