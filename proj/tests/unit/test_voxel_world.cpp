#include <doctest.h>

#include <set>
#include <sstream>

#include "test_support.hpp"
#include "viewpath/voxel_world.hpp"

using namespace viewpath;

namespace {

VoxelGrid unit_grid(int n = 10, double r = 0.1) {
  return VoxelGrid(Vec3::Zero(), r, Eigen::Vector3i(n, n, n));
}

// Cells along a ray by dense point sampling; consecutive duplicates removed.
std::vector<VoxelIndex> sampled_cells(const VoxelGrid& g, const Vec3& o, const Vec3& d, double len) {
  std::vector<VoxelIndex> out;
  const int n = 200000;
  for (int i = 0; i <= n; ++i) {
    const double t = len * i / n;
    const VoxelIndex v = g.index_of(o + t * d);
    if (!g.in_bounds(v)) continue;
    if (out.empty() || !(out.back() == v)) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("voxel walk matches dense sampling on random rays") {
  const VoxelGrid g = unit_grid();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 o(u(rng), u(rng), u(rng));
    const Vec3 d = Vec3(n(rng), n(rng), n(rng)).normalized();
    const double len = 0.2 + 1.2 * u(rng);
    std::vector<VoxelIndex> walked;
    g.walk(o, d, len, [&](std::size_t lin, const VoxelIndex& v, double, double) {
      CHECK(lin == g.linear(v));
      walked.push_back(v);
      return true;
    });
    const auto sampled = sampled_cells(g, o, d, len);
    REQUIRE(walked.size() == sampled.size());
    for (std::size_t i = 0; i < walked.size(); ++i) CHECK(walked[i] == sampled[i]);
  }
}

TEST_CASE("voxel walk enters the grid from outside and reports entry distances") {
  const VoxelGrid g = unit_grid();
  std::vector<double> entries;
  g.walk(Vec3(-0.25, 0.55, 0.55), Vec3::UnitX(), 10.0, [&](std::size_t, const VoxelIndex& v, double t0, double) {
    entries.push_back(t0);
    CHECK(v.y == 5);
    return true;
  });
  REQUIRE(entries.size() == 10);
  CHECK(entries.front() == doctest::Approx(0.25));
  CHECK(entries[3] == doctest::Approx(0.55));
}

TEST_CASE("voxel entropy values") {
  CHECK(voxel_entropy(0.5) == doctest::Approx(std::log(2.0)));
  CHECK(voxel_entropy(0.1) == doctest::Approx(0.3250829734).epsilon(1e-9));
  CHECK(voxel_entropy(0.0) == 0.0);
  CHECK(voxel_entropy(1.0) == 0.0);
}

TEST_CASE("ray information worked example: occluded ray and ray into unknown space") {
  // A 1 x 1 x 8 row of cells along +x; free cells at p = 0.1.
  const VoxelGrid g(Vec3::Zero(), 1.0, Eigen::Vector3i(8, 1, 1));
  OccupancyMap occluded(g), open(g);
  for (int i = 0; i < 3; ++i) {
    occluded.set_probability({i, 0, 0}, 0.1);
    open.set_probability({i, 0, 0}, 0.1);
  }
  occluded.set_probability({3, 0, 0}, 0.9);
  const Vec3 o(0.0, 0.5, 0.5);
  const double r2 = ray_information(occluded, o, Vec3::UnitX(), 8.0);
  const double r4 = ray_information(open, o, Vec3::UnitX(), 6.0);  // 3 free + 3 unknown in range
  CHECK(std::abs(r2 - 0.975) < 1e-3);
  CHECK(std::abs(r4 - 3.054) < 1e-3);
}

TEST_CASE("log-odds updates clamp and classify") {
  const VoxelGrid g = unit_grid(2);
  OccupancyMap m(g);
  const std::size_t c = 0;
  CHECK(m.state(c) == CellState::kUnknown);
  CHECK(m.probability(c) == doctest::Approx(0.5));
  for (int i = 0; i < 50; ++i) m.update(c, true);
  CHECK(m.probability(c) == doctest::Approx(0.97));
  CHECK(m.state(c) == CellState::kOccupied);
  for (int i = 0; i < 100; ++i) m.update(c, false);
  CHECK(m.probability(c) == doctest::Approx(0.12));
  CHECK(m.state(c) == CellState::kFree);
  OccupancyMap one(g);
  one.update(1, true);
  CHECK(one.probability(1) == doctest::Approx(0.7));
  one.update(2, false);
  CHECK(one.probability(2) == doctest::Approx(0.4));
}

TEST_CASE("camera rays cover the field of view symmetrically") {
  Pose cam;
  cam.rotation = look_rotation(Vec3::UnitX());
  const FieldOfView fov;
  const auto rays = camera_rays(cam, fov, 3, 3);
  REQUIRE(rays.size() == 9);
  CHECK((rays[4] - Vec3::UnitX()).norm() < 1e-12);
  // Top-left pixel centre is up and to the left of the axis.
  CHECK(rays[0].z() > 0.0);
  CHECK(rays[0].y() > 0.0);
  const auto dense = camera_rays(cam, fov, 64, 48);
  double max_h = 0.0;
  for (const Vec3& r : dense) max_h = std::max(max_h, std::atan2(std::abs(r.y()), r.x()));
  CHECK(max_h < deg2rad(37.0));
  CHECK(max_h > deg2rad(35.0));
}

TEST_CASE("depth scan hits a wall at the analytic distance and fuses once per cell") {
  const VoxelGrid g(Vec3(-1.0, -1.0, 0.0), 0.05, Eigen::Vector3i(40, 40, 20));
  GroundTruthScene scene(g);
  for (int y = 0; y < 40; ++y)
    for (int z = 0; z < 20; ++z) scene.set_occupied({30, y, z});  // wall at x in [0.5, 0.55)
  Pose cam;
  cam.rotation = look_rotation(Vec3::UnitX());
  cam.position = Vec3(-0.5, 0.01, 0.51);
  const DepthScan scan = simulate_depth_scan(scene, cam, FieldOfView{}, 1, 1, 4.5);
  REQUIRE(scan.rays.size() == 1);
  CHECK(scan.rays[0].hit);
  CHECK(scan.rays[0].distance == doctest::Approx(1.0));
  OccupancyMap map(g);
  integrate_scan(map, scan);
  integrate_scan(map, scan);
  const auto hit = static_cast<std::size_t>(scan.rays[0].hit_cell);
  CHECK(map.probability(hit) > 0.7);
  // Two scans: the free cell in front saw exactly two misses.
  const std::size_t front = g.linear(g.index_of(Vec3(0.2, 0.01, 0.51)));
  CHECK(map.log_odds(front) == doctest::Approx(2.0 * std::log(0.4 / 0.6)));
  // Behind the wall remains untouched.
  CHECK(!map.touched(g.linear(g.index_of(Vec3(0.8, 0.01, 0.51)))));
}

TEST_CASE("a missed ray clears free space up to the sensor range") {
  const VoxelGrid g(Vec3(0.0, 0.0, 0.0), 0.1, Eigen::Vector3i(100, 1, 1));
  GroundTruthScene scene(g);
  Pose cam;
  cam.rotation = look_rotation(Vec3::UnitX());
  cam.position = Vec3(0.0, 0.05, 0.05);
  const DepthScan scan = simulate_depth_scan(scene, cam, FieldOfView{}, 1, 1, 2.0);
  CHECK_FALSE(scan.rays[0].hit);
  OccupancyMap map(g);
  integrate_scan(map, scan);
  int touched = 0;
  for (std::size_t c = 0; c < g.size(); ++c) touched += map.touched(c) ? 1 : 0;
  CHECK(touched == 20);
}

TEST_CASE("total entropy of an untouched box is N ln 2") {
  const VoxelGrid g = unit_grid(10, 0.1);
  OccupancyMap map(g);
  const Aabb box{Vec3(0.0, 0.0, 0.0), Vec3(0.5, 1.0, 1.0)};
  CHECK(cells_in_box(g, box) == 500);
  CHECK(total_entropy(map, box) == doctest::Approx(500 * std::log(2.0)));
  map.set_probability({0, 0, 0}, 0.1);
  CHECK(total_entropy(map, box) == doctest::Approx(499 * std::log(2.0) + voxel_entropy(0.1)));
}

TEST_CASE("traverse reports cell probabilities in order") {
  const VoxelGrid g(Vec3::Zero(), 1.0, Eigen::Vector3i(4, 1, 1));
  OccupancyMap map(g);
  map.set_probability({1, 0, 0}, 0.9);
  const auto cells = traverse(map, Vec3(0.0, 0.5, 0.5), Vec3::UnitX(), 10.0);
  REQUIRE(cells.size() == 4);
  CHECK(cells[1].index == VoxelIndex{1, 0, 0});
  CHECK(cells[1].probability == doctest::Approx(0.9));
  CHECK(cells[2].probability == doctest::Approx(0.5));
}

TEST_CASE("snapshot lists touched cells only") {
  const VoxelGrid g = unit_grid(3, 1.0);
  OccupancyMap map(g);
  map.set_probability({1, 2, 0}, 0.8);
  std::ostringstream out;
  export_snapshot(map, out);
  std::istringstream in(out.str());
  double x, y, z, l;
  in >> x >> y >> z >> l;
  CHECK(x == doctest::Approx(1.5));
  CHECK(y == doctest::Approx(2.5));
  CHECK(z == doctest::Approx(0.5));
  CHECK(l == doctest::Approx(std::log(0.8 / 0.2)));
  std::string rest;
  CHECK_FALSE(static_cast<bool>(in >> rest));
}

TEST_CASE("grid covering snaps to resolution multiples") {
  const VoxelGrid g = VoxelGrid::covering(Aabb{Vec3(-0.31, -0.31, 0.0), Vec3(0.31, 0.31, 0.5)}, 0.1);
  CHECK(g.origin().x() == doctest::Approx(-0.4));
  CHECK(g.bounds().max.x() >= 0.31);
  CHECK(g.dims().z() == 5);
}
