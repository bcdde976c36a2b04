#include "viewpath/voxel_world.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace viewpath {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

VoxelGrid::VoxelGrid(const Vec3& origin, double resolution, const Eigen::Vector3i& dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
  if (!(resolution > 0.0)) throw std::invalid_argument("voxel resolution must be positive");
  if ((dims.array() <= 0).any()) throw std::invalid_argument("voxel grid dims must be positive");
}

VoxelGrid VoxelGrid::covering(const Aabb& box, double resolution) {
  Eigen::Vector3i lo;
  Eigen::Vector3i hi;
  for (int a = 0; a < 3; ++a) {
    lo[a] = static_cast<int>(std::floor(box.min[a] / resolution + 1e-9));
    hi[a] = static_cast<int>(std::ceil(box.max[a] / resolution - 1e-9));
  }
  return VoxelGrid(resolution * lo.cast<double>(), resolution, hi - lo);
}

OccupancyMap::OccupancyMap(const VoxelGrid& grid, const OccupancyParams& params)
    : grid_(grid), params_(params), log_odds_(grid.size(), 0.0) {
  if (!(params.prob_hit > 0.5 && params.prob_hit < 1.0) ||
      !(params.prob_miss > 0.0 && params.prob_miss < 0.5))
    throw std::invalid_argument("occupancy hit/miss probabilities out of range");
  if (!(params.clamp_min > 0.0 && params.clamp_min < params.clamp_max && params.clamp_max < 1.0))
    throw std::invalid_argument("occupancy clamping bounds out of range");
  hit_log_odds_ = logit(params.prob_hit);
  miss_log_odds_ = logit(params.prob_miss);
  min_log_odds_ = logit(params.clamp_min);
  max_log_odds_ = logit(params.clamp_max);
  free_log_odds_ = logit(params.free_threshold);
  occupied_log_odds_ = logit(params.occupied_threshold);
}

double OccupancyMap::probability(std::size_t cell) const {
  const double l = log_odds_[cell];
  if (l == 0.0) return 0.5;
  return 1.0 / (1.0 + std::exp(-l));
}

double OccupancyMap::probability(const VoxelIndex& v) const {
  if (!grid_.in_bounds(v)) return 0.5;
  return probability(grid_.linear(v));
}

void OccupancyMap::update(std::size_t cell, bool hit) {
  double& l = log_odds_[cell];
  l = std::clamp(l + (hit ? hit_log_odds_ : miss_log_odds_), min_log_odds_, max_log_odds_);
}

void OccupancyMap::set_probability(const VoxelIndex& v, double p) {
  if (!grid_.in_bounds(v)) throw std::out_of_range("voxel outside map");
  if (p <= 0.0)
    log_odds_[grid_.linear(v)] = -std::numeric_limits<double>::infinity();
  else if (p >= 1.0)
    log_odds_[grid_.linear(v)] = std::numeric_limits<double>::infinity();
  else
    log_odds_[grid_.linear(v)] = p == 0.5 ? 0.0 : logit(p);
}

std::uint32_t OccupancyMap::begin_scan() {
  if (marks_.size() != log_odds_.size()) marks_.assign(log_odds_.size(), 0);
  if (scan_counter_ >= (std::numeric_limits<std::uint32_t>::max() >> 1) - 1) {
    std::fill(marks_.begin(), marks_.end(), 0);
    scan_counter_ = 0;
  }
  return ++scan_counter_;
}

std::vector<VoxelIndex> GroundTruthScene::object_voxels() const {
  std::vector<VoxelIndex> out;
  for (std::size_t i = 0; i < occupied.size(); ++i)
    if (occupied[i]) out.push_back(grid.unravel(i));
  return out;
}

std::vector<VoxelIndex> GroundTruthScene::surface_voxels() const {
  static constexpr int kNeighbours[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                            {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  std::vector<VoxelIndex> out;
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    if (!occupied[i]) continue;
    const VoxelIndex v = grid.unravel(i);
    for (const auto& n : kNeighbours) {
      const VoxelIndex w{v.x + n[0], v.y + n[1], v.z + n[2]};
      if (grid.in_bounds(w) && !occupied[grid.linear(w)]) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

std::vector<Vec3> camera_rays(const Pose& camera, const FieldOfView& fov, int width, int height) {
  std::vector<Vec3> rays;
  rays.reserve(static_cast<std::size_t>(width) * height);
  const double tx = std::tan(deg2rad(fov.horizontal_deg) / 2.0);
  const double ty = std::tan(deg2rad(fov.vertical_deg) / 2.0);
  const Vec3 right = camera.rotation.col(0);
  const Vec3 down = camera.rotation.col(1);
  const Vec3 forward = camera.rotation.col(2);
  for (int v = 0; v < height; ++v) {
    const double yn = ty * (2.0 * (v + 0.5) / height - 1.0);
    for (int u = 0; u < width; ++u) {
      const double xn = tx * (2.0 * (u + 0.5) / width - 1.0);
      rays.push_back((forward + xn * right + yn * down).normalized());
    }
  }
  return rays;
}

std::vector<TraversedVoxel> traverse(const OccupancyMap& map, const Vec3& origin,
                                     const Vec3& direction, double max_dist) {
  std::vector<TraversedVoxel> out;
  map.grid().walk(origin, direction, max_dist,
                  [&](std::size_t cell, const VoxelIndex& v, double, double) {
                    out.push_back({v, map.probability(cell)});
                    return true;
                  });
  return out;
}

DepthScan simulate_depth_scan(const GroundTruthScene& scene, const Pose& camera,
                              const FieldOfView& fov, int width, int height, double d_max) {
  DepthScan scan;
  scan.max_range = d_max;
  const std::vector<Vec3> dirs = camera_rays(camera, fov, width, height);
  scan.rays.reserve(dirs.size());
  for (const Vec3& d : dirs) {
    DepthRay ray;
    ray.origin = camera.position;
    ray.direction = d;
    scene.grid.walk(camera.position, d, d_max,
                    [&](std::size_t cell, const VoxelIndex&, double t_entry, double) {
                      if (!scene.occupied[cell]) return true;
                      if (t_entry <= 0.0) return true;  // camera inside geometry
                      ray.hit = true;
                      ray.distance = t_entry;
                      ray.hit_cell = static_cast<std::int64_t>(cell);
                      return false;
                    });
    scan.rays.push_back(ray);
  }
  return scan;
}

void integrate_scan(OccupancyMap& map, const DepthScan& scan) {
  const std::uint32_t id = map.begin_scan();
  const std::uint32_t occupied_mark = 2 * id + 1;
  const std::uint32_t free_mark = 2 * id;
  for (const DepthRay& ray : scan.rays) {
    if (!ray.hit || ray.hit_cell < 0) continue;
    const auto cell = static_cast<std::size_t>(ray.hit_cell);
    std::uint32_t& m = map.mark(cell);
    if (m == occupied_mark) continue;
    m = occupied_mark;
    map.update(cell, true);
  }
  for (const DepthRay& ray : scan.rays) {
    // extend hit rays slightly so the walk reaches the hit cell and stops there
    const double range = ray.hit ? ray.distance + map.grid().resolution() : scan.max_range;
    map.grid().walk(ray.origin, ray.direction, range,
                    [&](std::size_t cell, const VoxelIndex&, double, double) {
                      if (ray.hit && static_cast<std::int64_t>(cell) == ray.hit_cell) return false;
                      std::uint32_t& m = map.mark(cell);
                      if (m >= free_mark) return true;
                      m = free_mark;
                      map.update(cell, false);
                      return true;
                    });
  }
}

double voxel_entropy(double p) {
  double e = 0.0;
  if (p > 0.0 && p < 1.0) e = -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
  return e;
}

double ray_information(const OccupancyMap& map, const Vec3& origin, const Vec3& direction,
                       double max_dist) {
  double sum = 0.0;
  map.grid().walk(origin, direction, max_dist,
                  [&](std::size_t cell, const VoxelIndex&, double, double) {
                    if (map.is_occupied(cell)) return false;
                    sum += log_odds_entropy(map.log_odds(cell));
                    return true;
                  });
  return sum;
}

namespace {

struct IndexRange {
  int lo[3];
  int hi[3];  // exclusive
};

IndexRange box_range(const VoxelGrid& grid, const Aabb& box) {
  IndexRange r{};
  for (int a = 0; a < 3; ++a) {
    // cell centre c_i = o + (i + 0.5) r must satisfy min <= c_i <= max
    const double o = grid.origin()[a];
    const double res = grid.resolution();
    int lo = static_cast<int>(std::ceil((box.min[a] - o) / res - 0.5 - 1e-9));
    int hi = static_cast<int>(std::floor((box.max[a] - o) / res - 0.5 + 1e-9)) + 1;
    r.lo[a] = std::max(lo, 0);
    r.hi[a] = std::min(hi, grid.dims()[a]);
  }
  return r;
}

}  // namespace

std::size_t cells_in_box(const VoxelGrid& grid, const Aabb& box) {
  const IndexRange r = box_range(grid, box);
  std::size_t n = 1;
  for (int a = 0; a < 3; ++a) n *= static_cast<std::size_t>(std::max(0, r.hi[a] - r.lo[a]));
  return n;
}

double total_entropy(const OccupancyMap& map, const Aabb& box) {
  const VoxelGrid& grid = map.grid();
  const IndexRange r = box_range(grid, box);
  double sum = 0.0;
  for (int z = r.lo[2]; z < r.hi[2]; ++z) {
    for (int y = r.lo[1]; y < r.hi[1]; ++y) {
      std::size_t cell = grid.linear({r.lo[0], y, z});
      for (int x = r.lo[0]; x < r.hi[0]; ++x, ++cell) sum += log_odds_entropy(map.log_odds(cell));
    }
  }
  return sum;
}

void export_snapshot(const OccupancyMap& map, std::ostream& out) {
  const VoxelGrid& grid = map.grid();
  char line[128];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!map.touched(i)) continue;
    const Vec3 c = grid.center(grid.unravel(i));
    std::snprintf(line, sizeof(line), "%.4f %.4f %.4f %.6f\n", c.x(), c.y(), c.z(),
                  map.log_odds(i));
    out << line;
  }
}

}  // namespace viewpath
