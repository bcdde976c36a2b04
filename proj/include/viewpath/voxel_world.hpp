#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "viewpath/geometry.hpp"

namespace viewpath {

struct VoxelIndex {
  int x = 0;
  int y = 0;
  int z = 0;
  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
  friend auto operator<=>(const VoxelIndex&, const VoxelIndex&) = default;
};

/// Uniform axis-aligned voxel grid geometry. Cell (i, j, k) spans
/// [origin + i*r, origin + (i+1)*r) along each axis.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Vec3& origin, double resolution, const Eigen::Vector3i& dims);

  /// Smallest grid with cell boundaries on integer multiples of `resolution`
  /// that covers `box`.
  static VoxelGrid covering(const Aabb& box, double resolution);

  double resolution() const { return resolution_; }
  const Vec3& origin() const { return origin_; }
  const Eigen::Vector3i& dims() const { return dims_; }
  std::size_t size() const {
    return static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z();
  }
  Aabb bounds() const { return {origin_, origin_ + resolution_ * dims_.cast<double>()}; }

  bool in_bounds(const VoxelIndex& v) const {
    return v.x >= 0 && v.y >= 0 && v.z >= 0 && v.x < dims_.x() && v.y < dims_.y() &&
           v.z < dims_.z();
  }
  std::size_t linear(const VoxelIndex& v) const {
    return (static_cast<std::size_t>(v.z) * dims_.y() + v.y) * dims_.x() + v.x;
  }
  VoxelIndex unravel(std::size_t i) const {
    const int x = static_cast<int>(i % dims_.x());
    i /= dims_.x();
    return {x, static_cast<int>(i % dims_.y()), static_cast<int>(i / dims_.y())};
  }
  VoxelIndex index_of(const Vec3& p) const {
    return {static_cast<int>(std::floor((p.x() - origin_.x()) / resolution_)),
            static_cast<int>(std::floor((p.y() - origin_.y()) / resolution_)),
            static_cast<int>(std::floor((p.z() - origin_.z()) / resolution_))};
  }
  Vec3 center(const VoxelIndex& v) const {
    return origin_ + resolution_ * Vec3(v.x + 0.5, v.y + 0.5, v.z + 0.5);
  }

  /// Amanatides-Woo walk from `from` along unit `dir` for `max_dist` metres,
  /// restricted to the grid. Calls visit(linear, index, t_entry, t_exit) in
  /// order; the visitor returns false to stop.
  template <class Visitor>
  void walk(const Vec3& from, const Vec3& dir, double max_dist, Visitor&& visit) const;

 private:
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 0.03;
  Eigen::Vector3i dims_ = Eigen::Vector3i::Zero();
};

struct OccupancyParams {
  double prob_hit = 0.7;
  double prob_miss = 0.4;
  double clamp_min = 0.12;
  double clamp_max = 0.97;
  double free_threshold = 0.2;
  double occupied_threshold = 0.7;
};

enum class CellState { kFree, kUnknown, kOccupied };

/// Log-odds occupancy map. Cells never updated report P = 0.5.
/// Storage is dense over the grid.
class OccupancyMap {
 public:
  OccupancyMap() = default;
  OccupancyMap(const VoxelGrid& grid, const OccupancyParams& params = {});

  const VoxelGrid& grid() const { return grid_; }
  const OccupancyParams& params() const { return params_; }

  double log_odds(std::size_t cell) const { return log_odds_[cell]; }
  double probability(std::size_t cell) const;
  double probability(const VoxelIndex& v) const;
  CellState state(std::size_t cell) const {
    const double l = log_odds_[cell];
    if (l > occupied_log_odds_) return CellState::kOccupied;
    if (l < free_log_odds_) return CellState::kFree;
    return CellState::kUnknown;
  }
  bool is_occupied(std::size_t cell) const { return log_odds_[cell] > occupied_log_odds_; }
  bool touched(std::size_t cell) const { return log_odds_[cell] != 0.0; }

  /// Single log-odds update with clamping.
  void update(std::size_t cell, bool hit);
  /// Overwrites a cell with probability p (clamping not applied). For
  /// constructing test maps and importing snapshots.
  void set_probability(const VoxelIndex& v, double p);
  void set_log_odds(std::size_t cell, double l) { log_odds_[cell] = l; }

  std::span<const double> raw() const { return log_odds_; }

  /// Per-scan bookkeeping used by integrate_scan to update each cell at most
  /// once per scan.
  std::uint32_t begin_scan();
  std::uint32_t& mark(std::size_t cell) { return marks_[cell]; }

 private:
  VoxelGrid grid_;
  OccupancyParams params_;
  std::vector<double> log_odds_;
  std::vector<std::uint32_t> marks_;
  std::uint32_t scan_counter_ = 0;
  double hit_log_odds_ = 0.0;
  double miss_log_odds_ = 0.0;
  double min_log_odds_ = 0.0;
  double max_log_odds_ = 0.0;
  double free_log_odds_ = 0.0;
  double occupied_log_odds_ = 0.0;
};

/// Hidden ground truth: object voxels on the map grid plus the planar
/// obstacle layout.
struct GroundTruthScene {
  VoxelGrid grid;
  std::vector<std::uint8_t> occupied;  // one flag per grid cell
  Aabb bounding_box;
  Circle forbidden_cylinder;
  std::vector<Circle> obstacles;

  explicit GroundTruthScene(const VoxelGrid& g = {}) : grid(g), occupied(g.size(), 0) {}

  void set_occupied(const VoxelIndex& v) { occupied[grid.linear(v)] = 1; }
  bool is_occupied(std::size_t cell) const { return occupied[cell] != 0; }
  std::vector<VoxelIndex> object_voxels() const;
  /// Object voxels with at least one in-grid 6-neighbour outside the object.
  std::vector<VoxelIndex> surface_voxels() const;
};

struct FieldOfView {
  double horizontal_deg = 74.0;
  double vertical_deg = 60.0;
};

/// Pinhole ray raster through pixel centres, row-major (rows top to bottom).
std::vector<Vec3> camera_rays(const Pose& camera, const FieldOfView& fov, int width, int height);

struct DepthRay {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  bool hit = false;
  double distance = 0.0;  // metres to the entry of the hit voxel
  std::int64_t hit_cell = -1;
};

struct DepthScan {
  std::vector<DepthRay> rays;
  double max_range = 4.5;  // misses clear free space up to this range
};

struct TraversedVoxel {
  VoxelIndex index;
  double probability = 0.5;
};

std::vector<TraversedVoxel> traverse(const OccupancyMap& map, const Vec3& origin,
                                     const Vec3& direction, double max_dist);

DepthScan simulate_depth_scan(const GroundTruthScene& scene, const Pose& camera,
                              const FieldOfView& fov, int width, int height, double d_max);

/// Fuses a scan: cells in front of a hit get one miss, hit cells one hit;
/// every cell is touched at most once per scan and hits take precedence.
void integrate_scan(OccupancyMap& map, const DepthScan& scan);

/// Binary entropy in nats with 0 ln 0 = 0.
double voxel_entropy(double p);

inline double log_odds_entropy(double l) {
  if (l == 0.0) return std::numbers::ln2;
  const double p = 1.0 / (1.0 + std::exp(-l));
  return voxel_entropy(p);
}

/// Sum of voxel entropies along a ray, stopping before the first occupied
/// cell.
double ray_information(const OccupancyMap& map, const Vec3& origin, const Vec3& direction,
                       double max_dist);

/// Entropy summed over all cells whose centres lie in `box`.
double total_entropy(const OccupancyMap& map, const Aabb& box);

/// Number of grid cells whose centres lie in `box`.
std::size_t cells_in_box(const VoxelGrid& grid, const Aabb& box);

/// Plain-text snapshot: one "x y z log_odds" line per touched cell
/// (cell-centre coordinates).
void export_snapshot(const OccupancyMap& map, std::ostream& out);

// ---------------------------------------------------------------------------

template <class Visitor>
void VoxelGrid::walk(const Vec3& from, const Vec3& dir, double max_dist, Visitor&& visit) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kEps = 1e-9;
  const Vec3 lo = origin_;
  const Vec3 hi = origin_ + resolution_ * dims_.cast<double>();

  double t0 = 0.0;
  double t1 = max_dist;
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (from[a] < lo[a] || from[a] >= hi[a]) return;
      continue;
    }
    double ta = (lo[a] - from[a]) / dir[a];
    double tb = (hi[a] - from[a]) / dir[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 >= t1 - kEps) return;

  const Vec3 start = from + t0 * dir;
  int idx[3];
  int step[3];
  double t_max[3];
  double t_delta[3];
  for (int a = 0; a < 3; ++a) {
    const double u = (start[a] - origin_[a]) / resolution_;
    int i = static_cast<int>(std::floor(u));
    if (dir[a] < 0.0 && u == std::floor(u)) --i;
    i = std::clamp(i, 0, dims_[a] - 1);
    idx[a] = i;
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_max[a] = (origin_[a] + (i + 1) * resolution_ - from[a]) / dir[a];
      t_delta[a] = resolution_ / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (origin_[a] + i * resolution_ - from[a]) / dir[a];
      t_delta[a] = -resolution_ / dir[a];
    } else {
      step[a] = 0;
      t_max[a] = kInf;
      t_delta[a] = kInf;
    }
  }

  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(dims_.x());
  const std::size_t sz = sy * static_cast<std::size_t>(dims_.y());
  const std::ptrdiff_t lin_step[3] = {step[0] * static_cast<std::ptrdiff_t>(sx),
                                      step[1] * static_cast<std::ptrdiff_t>(sy),
                                      step[2] * static_cast<std::ptrdiff_t>(sz)};
  std::size_t lin = idx[2] * sz + idx[1] * sy + idx[0];
  double t_entry = t0;
  while (true) {
    int a = 0;
    if (t_max[1] < t_max[a]) a = 1;
    if (t_max[2] < t_max[a]) a = 2;
    const double t_exit = std::min(t_max[a], t1);
    if (!visit(lin, VoxelIndex{idx[0], idx[1], idx[2]}, t_entry, t_exit)) return;
    t_entry = t_max[a];
    if (t_entry >= t1 - kEps) return;
    idx[a] += step[a];
    if (idx[a] < 0 || idx[a] >= dims_[a]) return;
    lin = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(lin) + lin_step[a]);
    t_max[a] += t_delta[a];
  }
}

}  // namespace viewpath
