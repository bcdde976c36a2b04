#include "viewpath/metrics.hpp"

#include <stdexcept>

namespace viewpath {

SpatialHash::SpatialHash(PointCloud points, double cell) : points_(std::move(points)), cell_(cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("spatial hash cell must be positive");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Eigen::Vector3i b = bucket(points_[i]);
    buckets_[key(b.x(), b.y(), b.z())].push_back(static_cast<std::uint32_t>(i));
  }
}

SpatialHash::Key SpatialHash::key(long x, long y, long z) const {
  // 21 bits per axis, offset to keep negative buckets distinct.
  constexpr long kOffset = 1L << 20;
  const auto u = [](long v) { return static_cast<std::uint64_t>(v + kOffset) & 0x1FFFFFu; };
  return (u(x) << 42) | (u(y) << 21) | u(z);
}

Eigen::Vector3i SpatialHash::bucket(const Vec3& p) const {
  return {static_cast<int>(std::floor(p.x() / cell_)), static_cast<int>(std::floor(p.y() / cell_)),
          static_cast<int>(std::floor(p.z() / cell_))};
}

double coverage(const PointCloud& partial, const PointCloud& reference, double eps) {
  if (reference.empty()) throw std::invalid_argument("reference cloud is empty");
  CoverageTracker t(reference, eps);
  t.add(partial);
  return t.coverage();
}

// Distances are computed from rounded coordinates, so a point placed exactly eps
// away can land a few ulps beyond it. The slack is far below 1e-9.
constexpr double kBoundarySlack = 1e-12;

CoverageTracker::CoverageTracker(PointCloud reference, double eps)
    : eps_(eps + kBoundarySlack),
      hash_(std::move(reference), eps_ > 1e-9 ? eps_ : 1e-9),
      covered_(hash_.points().size(), 0) {}

void CoverageTracker::add_point(const Vec3& p) {
  hash_.for_each_within(p, eps_, [&](std::uint32_t i) {
    if (!covered_[i]) {
      covered_[i] = 1;
      ++covered_count_;
    }
  });
}

void CoverageTracker::add(const PointCloud& partial) {
  for (const Vec3& p : partial) add_point(p);
}

double CoverageTracker::coverage() const {
  if (covered_.empty()) return 0.0;
  return static_cast<double>(covered_count_) / static_cast<double>(covered_.size());
}

PointCloud reconstruct_cloud(const OccupancyMap& map) {
  PointCloud cloud;
  const auto raw = map.raw();
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (map.is_occupied(i)) cloud.push_back(map.grid().center(map.grid().unravel(i)));
  return cloud;
}

}  // namespace viewpath
