#include <doctest.h>

#include <random>

#include "viewpath/metrics.hpp"

using namespace viewpath;

namespace {

double brute_force(const PointCloud& partial, const PointCloud& reference, double eps) {
  std::size_t covered = 0;
  for (const Vec3& r : reference) {
    for (const Vec3& p : partial) {
      if ((p - r).norm() <= eps) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(reference.size());
}

PointCloud random_cloud(std::mt19937_64& rng, int n, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent);
  PointCloud c;
  for (int i = 0; i < n; ++i) c.emplace_back(u(rng), u(rng), u(rng));
  return c;
}

}  // namespace

TEST_CASE("coverage matches the brute-force double loop") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> size(1, 1000);
  for (int t = 0; t < 30; ++t) {
    const PointCloud ref = random_cloud(rng, size(rng), 0.1);
    const PointCloud part = random_cloud(rng, size(rng), 0.1);
    for (double eps : {0.008, 0.02}) CHECK(coverage(part, ref, eps) == brute_force(part, ref, eps));
  }
}

TEST_CASE("coverage trivial cases") {
  std::mt19937_64 rng(14);
  const PointCloud ref = random_cloud(rng, 500, 1.0);
  CHECK(coverage(ref, ref) == 1.0);
  CHECK(coverage({}, ref) == 0.0);
}

TEST_CASE("epsilon boundary is inclusive") {
  const PointCloud ref = {Vec3(0.25, 0.5, 0.125)};
  CHECK(coverage({ref[0] + Vec3(0.008, 0.0, 0.0)}, ref) == 1.0);
  CHECK(coverage({ref[0] + Vec3(0.008 + 1e-9, 0.0, 0.0)}, ref) == 0.0);
  CHECK(coverage({ref[0] - Vec3(0.0, 0.0, 0.008)}, ref) == 1.0);
}

TEST_CASE("tracker is monotone and matches batch coverage") {
  std::mt19937_64 rng(15);
  const PointCloud ref = random_cloud(rng, 800, 0.1);
  CoverageTracker tr(ref);
  PointCloud all;
  double last = 0.0;
  for (int k = 0; k < 10; ++k) {
    const PointCloud batch = random_cloud(rng, 50, 0.1);
    tr.add(batch);
    all.insert(all.end(), batch.begin(), batch.end());
    CHECK(tr.coverage() >= last);
    last = tr.coverage();
    CHECK(tr.coverage() == coverage(all, ref));
  }
}

TEST_CASE("coverage is invariant to a shared rigid transform") {
  std::mt19937_64 rng(16);
  const PointCloud ref = random_cloud(rng, 400, 0.1);
  const PointCloud part = random_cloud(rng, 400, 0.1);
  const Mat3 r = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Vec3 t(0.3, -1.2, 2.0);
  PointCloud ref2, part2;
  for (const Vec3& p : ref) ref2.push_back(r * p + t);
  for (const Vec3& p : part) part2.push_back(r * p + t);
  // Rounding can move pairs sitting exactly at eps; random clouds have none.
  CHECK(coverage(part2, ref2) == coverage(part, ref));
}

TEST_CASE("reconstruct_cloud emits occupied cell centres") {
  VoxelGrid grid(Vec3::Zero(), 0.1, Eigen::Vector3i(5, 5, 5));
  OccupancyMap map(grid);
  CHECK(reconstruct_cloud(map).empty());
  const std::vector<VoxelIndex> cells = {{1, 2, 3}, {4, 0, 0}, {0, 0, 1}};
  for (const VoxelIndex& v : cells) map.set_probability(v, 0.99);
  const PointCloud c = reconstruct_cloud(map);
  REQUIRE(c.size() == 3);
  // Linear order: x fastest.
  CHECK((c[0] - grid.center({4, 0, 0})).norm() < 1e-12);
  CHECK((c[1] - grid.center({0, 0, 1})).norm() < 1e-12);
  CHECK((c[2] - grid.center({1, 2, 3})).norm() < 1e-12);
}
