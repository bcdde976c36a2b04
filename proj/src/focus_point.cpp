#include "viewpath/focus_point.hpp"

#include <stdexcept>

namespace viewpath {

std::vector<Vec3> generate_focus_rays(const Vec3& camera_position, const Vec3& target,
                                      double fov_h_deg, double fov_v_deg, int grid) {
  const Vec3 axis_raw = target - camera_position;
  if (axis_raw.norm() < 1e-9) throw std::invalid_argument("focus FoV axis is degenerate");
  if (grid < 1) throw std::invalid_argument("focus ray grid must be >= 1");
  const Mat3 frame = look_rotation(axis_raw);
  const Vec3 right = frame.col(0);
  const Vec3 down = frame.col(1);
  const Vec3 axis = frame.col(2);
  const double tx = std::tan(deg2rad(fov_h_deg) / 2.0);
  const double ty = std::tan(deg2rad(fov_v_deg) / 2.0);

  std::vector<Vec3> rays;
  rays.reserve(static_cast<std::size_t>(grid) * grid);
  if (grid == 1) {
    rays.push_back(axis);
    return rays;
  }
  for (int v = 0; v < grid; ++v) {
    const double yn = ty * (2.0 * v / (grid - 1) - 1.0);
    for (int u = 0; u < grid; ++u) {
      const double xn = tx * (2.0 * u / (grid - 1) - 1.0);
      rays.push_back((axis + xn * right + yn * down).normalized());
    }
  }
  return rays;
}

Vec3 focus_target(const Vec3& camera_position, const Vec2& cylinder_center, double aim_z,
                  bool aim_at_object_center_height) {
  return {cylinder_center.x(), cylinder_center.y(),
          aim_at_object_center_height ? aim_z : camera_position.z()};
}

BestRay best_ray(const OccupancyMap& map, const std::vector<Vec3>& rays, const Vec3& origin,
                 double max_dist, std::size_t* work) {
  BestRay best;
  bool first = true;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    double gain = 0.0;
    std::size_t visited = 0;
    map.grid().walk(origin, rays[i], max_dist,
                    [&](std::size_t cell, const VoxelIndex&, double, double) {
                      ++visited;
                      if (map.is_occupied(cell)) return false;
                      gain += log_odds_entropy(map.log_odds(cell));
                      return true;
                    });
    if (work) *work += visited;
    if (first || gain > best.gain) {
      best = {i, rays[i], gain};
      first = false;
    }
  }
  return best;
}

FocusState update_focus(const std::optional<FocusState>& state, const Vec3& camera_position,
                        const OccupancyMap& map, const Vec2& cylinder_center, double aim_z,
                        const FocusParams& params, bool* recomputed, std::size_t* work) {
  if (recomputed) *recomputed = false;
  if (state && (camera_position - state->anchor).norm() <= params.recompute_threshold)
    return *state;

  const Vec3 target =
      focus_target(camera_position, cylinder_center, aim_z, params.aim_at_object_center_height);
  const auto rays = generate_focus_rays(camera_position, target, params.fov_horizontal_deg,
                                        params.fov_vertical_deg, params.grid);
  const BestRay best = best_ray(map, rays, camera_position, params.max_dist, work);
  if (recomputed) *recomputed = true;
  FocusState next;
  next.anchor = camera_position;
  next.direction = best.direction;
  next.point = camera_position + params.focus_distance * best.direction;
  next.best_ray_gain = best.gain;
  return next;
}

}  // namespace viewpath
