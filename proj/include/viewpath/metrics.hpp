#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "viewpath/voxel_world.hpp"

namespace viewpath {

using PointCloud = std::vector<Vec3>;

/// Uniform hash of points into cubic buckets of side `cell`.
class SpatialHash {
 public:
  SpatialHash(PointCloud points, double cell);

  const PointCloud& points() const { return points_; }

  /// Calls fn(index) for every stored point within `radius` (inclusive) of p.
  /// `radius` must not exceed the bucket size.
  template <class Fn>
  void for_each_within(const Vec3& p, double radius, Fn&& fn) const;

 private:
  using Key = std::uint64_t;
  Key key(long x, long y, long z) const;
  Eigen::Vector3i bucket(const Vec3& p) const;

  PointCloud points_;
  double cell_;
  std::unordered_map<Key, std::vector<std::uint32_t>> buckets_;
};

/// Fraction of reference points with some partial point within eps
/// (distance <= eps, with 1e-12 slack for coordinate rounding).
double coverage(const PointCloud& partial, const PointCloud& reference, double eps = 0.008);

/// Monotone coverage: a reference point stays covered once any observed
/// point has come within eps of it.
class CoverageTracker {
 public:
  CoverageTracker(PointCloud reference, double eps = 0.008);

  void add(const PointCloud& partial);
  void add_point(const Vec3& p);
  double coverage() const;
  std::size_t covered_count() const { return covered_count_; }
  std::size_t size() const { return covered_.size(); }

 private:
  double eps_;
  SpatialHash hash_;
  std::vector<std::uint8_t> covered_;
  std::size_t covered_count_ = 0;
};

/// Centres of all occupied cells, in linear cell order.
PointCloud reconstruct_cloud(const OccupancyMap& map);

template <class Fn>
void SpatialHash::for_each_within(const Vec3& p, double radius, Fn&& fn) const {
  const Eigen::Vector3i b = bucket(p);
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const auto it = buckets_.find(key(b.x() + dx, b.y() + dy, b.z() + dz));
        if (it == buckets_.end()) continue;
        for (std::uint32_t i : it->second)
          if ((points_[i] - p).norm() <= radius) fn(i);
      }
}

}  // namespace viewpath
