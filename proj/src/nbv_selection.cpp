#include "viewpath/nbv_selection.hpp"

#include <algorithm>
#include <thread>

namespace viewpath {

std::string to_string(ViewOrientation o) {
  switch (o) {
    case ViewOrientation::kForward: return "forward";
    case ViewOrientation::kUp: return "up";
    case ViewOrientation::kDown: return "down";
    case ViewOrientation::kLeft: return "left";
    case ViewOrientation::kRight: return "right";
  }
  return "forward";
}

std::vector<CandidateView> generate_candidates(const CandidateSpace& space) {
  std::vector<CandidateView> out;
  out.reserve(static_cast<std::size_t>(space.positions) * 5);
  const double c = std::cos(space.offset_angle);
  const double s = std::sin(space.offset_angle);
  for (int i = 0; i < space.positions; ++i) {
    const double phi = 2.0 * kPi * i / space.positions;
    const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
    const Vec3 position(space.center.x() + space.radius * radial.x(),
                        space.center.y() + space.radius * radial.y(), space.view_height);
    const Vec3 forward = -radial;
    const Vec3 left_axis = Vec3::UnitZ().cross(forward);  // horizontal, 90 deg CCW of forward
    const Vec3 dirs[5] = {forward, c * forward + s * Vec3::UnitZ(),
                          c * forward - s * Vec3::UnitZ(), c * forward + s * left_axis,
                          c * forward - s * left_axis};
    for (int k = 0; k < 5; ++k) {
      CandidateView v;
      v.id = i * 5 + k;
      v.position = position;
      v.direction = dirs[k].normalized();
      v.orientation = static_cast<ViewOrientation>(k);
      out.push_back(v);
    }
  }
  return out;
}

std::vector<std::size_t> rear_side_voxels(const OccupancyMap& map, const Pose& view,
                                          const RsvParams& params) {
  std::vector<std::size_t> found;
  const auto rays = camera_rays(view, params.fov, params.rays_x, params.rays_y);
  for (const Vec3& d : rays) {
    bool after_occupied = false;
    map.grid().walk(view.position, d, params.d_max,
                    [&](std::size_t cell, const VoxelIndex&, double, double) {
                      if (after_occupied) {
                        const double p = map.probability(cell);
                        if (p >= params.unknown_lo && p <= params.unknown_hi) found.push_back(cell);
                        return false;
                      }
                      if (map.is_occupied(cell)) after_occupied = true;
                      return true;
                    });
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

double rear_side_voxel_gain(const OccupancyMap& map, const CandidateView& view,
                            const RsvParams& params) {
  const auto cells = rear_side_voxels(map, view.pose(), params);
  if (!params.sum_entropy) return static_cast<double>(cells.size());
  double sum = 0.0;
  for (std::size_t c : cells) sum += log_odds_entropy(map.log_odds(c));
  return sum;
}

void score_candidates(const OccupancyMap& map, std::vector<CandidateView>& candidates,
                      const RsvParams& params, int threads) {
  const std::size_t n = candidates.size();
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      candidates[i].score = rear_side_voxel_gain(map, candidates[i], params);
  };
  if (threads <= 1 || n < 2) {
    work(0, n);
    return;
  }
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::jthread> pool;
  for (std::size_t k = 0; k < t; ++k) pool.emplace_back(work, k * n / t, (k + 1) * n / t);
}

std::optional<CandidateView> select_nbv(const std::vector<CandidateView>& candidates,
                                        const std::set<int>& visited) {
  std::optional<CandidateView> best;
  for (const CandidateView& c : candidates) {
    if (visited.contains(c.id)) continue;
    if (!best || c.score > best->score || (c.score == best->score && c.id < best->id)) best = c;
  }
  return best;
}

}  // namespace viewpath
