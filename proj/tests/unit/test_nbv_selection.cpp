#include <doctest.h>

#include "test_support.hpp"
#include "viewpath/nbv_selection.hpp"

using namespace viewpath;

namespace {

// Map with a wall of occupied cells at x in [1.0, 1.1); everything else unknown
// except a strip of free cells behind the wall for y > 0.
OccupancyMap wall_map() {
  const VoxelGrid g(Vec3(-2.0, -2.0, 0.0), 0.1, Eigen::Vector3i(40, 40, 10));
  OccupancyMap m(g);
  for (int y = 0; y < 40; ++y)
    for (int z = 0; z < 10; ++z) {
      m.set_probability({30, y, z}, 0.9);
      if (y >= 20) m.set_probability({31, y, z}, 0.1);
    }
  return m;
}

std::set<std::size_t> rsv_oracle(const OccupancyMap& map, const Pose& view, const RsvParams& p) {
  std::set<std::size_t> out;
  for (const Vec3& d : camera_rays(view, p.fov, p.rays_x, p.rays_y)) {
    const auto cells = traverse(map, view.position, d, p.d_max);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      if (cells[i].probability > map.params().occupied_threshold) {
        const double q = cells[i + 1].probability;
        if (q >= p.unknown_lo && q <= p.unknown_hi) out.insert(map.grid().linear(cells[i + 1].index));
        break;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("candidate ring: 40 positions x 5 orientations around the centre") {
  CandidateSpace s;
  s.center = Vec2(0.5, -0.5);
  const auto c = generate_candidates(s);
  REQUIRE(c.size() == 200);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c[i].id == static_cast<int>(i));
    CHECK((c[i].position.head<2>() - s.center).norm() == doctest::Approx(3.0));
    CHECK(c[i].position.z() == doctest::Approx(0.45));
    CHECK(c[i].direction.norm() == doctest::Approx(1.0));
  }
  // Forward looks at the axis; the other four are offset by 30 degrees.
  const Vec3 to_center = (Vec3(0.5, -0.5, 0.45) - c[0].position).normalized();
  CHECK(angle_between(c[0].direction, to_center) < 1e-12);
  for (int k = 1; k < 5; ++k) CHECK(angle_between(c[k].direction, c[0].direction) == doctest::Approx(kPi / 6));
  CHECK(c[1].direction.z() > 0.0);
  CHECK(c[2].direction.z() < 0.0);
  CHECK(to_string(c[3].orientation) == "left");
}

TEST_CASE("rear-side voxels match a per-ray oracle") {
  const OccupancyMap m = wall_map();
  RsvParams p;
  CandidateView v;
  v.position = Vec3(-1.5, 0.0, 0.5);
  v.direction = Vec3::UnitX();
  const auto found = rear_side_voxels(m, v.pose(), p);
  const auto oracle = rsv_oracle(m, v.pose(), p);
  CHECK(found.size() == oracle.size());
  CHECK(std::set<std::size_t>(found.begin(), found.end()) == oracle);
  // Only the y < 0 half has unknown cells behind the wall.
  CHECK(!found.empty());
  for (std::size_t c : found) CHECK(m.grid().unravel(c).y < 20);
  CHECK(rear_side_voxel_gain(m, v, p) == doctest::Approx(static_cast<double>(found.size())));
  p.sum_entropy = true;
  CHECK(rear_side_voxel_gain(m, v, p) == doctest::Approx(found.size() * std::log(2.0)));
}

TEST_CASE("a view with nothing occupied in front scores zero") {
  const OccupancyMap m = wall_map();
  CandidateView v;
  v.position = Vec3(-1.5, 0.0, 0.5);
  v.direction = -Vec3::UnitX();
  CHECK(rear_side_voxel_gain(m, v, RsvParams{}) == 0.0);
}

TEST_CASE("scoring is identical for any thread count") {
  const OccupancyMap m = wall_map();
  CandidateSpace s;
  s.radius = 1.5;
  s.positions = 8;
  s.view_height = 0.5;
  auto a = generate_candidates(s);
  auto b = a;
  score_candidates(m, a, RsvParams{}, 1);
  score_candidates(m, b, RsvParams{}, 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].score == b[i].score);
}

TEST_CASE("NBV selection: argmax over unvisited, ties to the lowest id") {
  std::vector<CandidateView> c(5);
  for (int i = 0; i < 5; ++i) c[i].id = i;
  c[1].score = 7;
  c[3].score = 7;
  c[4].score = 2;
  CHECK(select_nbv(c, {})->id == 1);
  CHECK(select_nbv(c, {1})->id == 3);
  CHECK(select_nbv(c, {1, 3})->id == 4);
  CHECK_FALSE(select_nbv(c, {0, 1, 2, 3, 4}).has_value());
}
