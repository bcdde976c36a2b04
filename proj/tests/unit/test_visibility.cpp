#include <doctest.h>

#include "test_support.hpp"
#include "viewpath/visibility.hpp"

using namespace viewpath;

TEST_CASE("a point on the optical axis is D sin(half angle) from each plane") {
  Pose cam;
  cam.rotation = look_rotation(Vec3(1.0, 1.0, 0.0));
  cam.position = Vec3(0.3, -0.2, 0.5);
  const FieldOfView fov;
  const FovPlanes planes = fov_planes(cam, fov);
  const double D = 2.5;
  const Eigen::Vector4d d = plane_distances(planes, cam.position + D * optical_axis(cam));
  CHECK(d[0] == doctest::Approx(D * std::sin(deg2rad(37.0))));
  CHECK(d[1] == doctest::Approx(D * std::sin(deg2rad(37.0))));
  CHECK(d[2] == doctest::Approx(D * std::sin(deg2rad(30.0))));
  CHECK(d[3] == doctest::Approx(D * std::sin(deg2rad(30.0))));
  // With d_f = 2.5 m the horizontal threshold is about half of d_r.
  CHECK(0.75 / d[1] == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("plane distances match planes built from the frustum edge rays") {
  Pose cam;
  cam.rotation = rpy_to_matrix(0.1, -0.3, 0.7) * look_rotation(Vec3::UnitX());
  cam.position = Vec3(1.0, 2.0, 0.4);
  const FieldOfView fov;
  const FovPlanes planes = fov_planes(cam, fov);
  const Vec3 right = cam.rotation.col(0), down = cam.rotation.col(1), fwd = cam.rotation.col(2);
  const double th = std::tan(deg2rad(37.0)), tv = std::tan(deg2rad(30.0));
  // Each side plane contains one edge direction and the perpendicular image axis.
  auto inward = [&](const Vec3& edge, const Vec3& other, const Vec3& inside) {
    Vec3 n = edge.cross(other).normalized();
    return n.dot(inside) > 0 ? n : Vec3(-n);
  };
  const Vec3 normals[4] = {inward(fwd - th * right, down, fwd), inward(fwd + th * right, down, fwd),
                           inward(fwd - tv * down, right, fwd), inward(fwd + tv * down, right, fwd)};
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Vec3 p = cam.position + 2.0 * Vec3(n(rng), n(rng), n(rng));
    const Eigen::Vector4d d = plane_distances(planes, p);
    for (int i = 0; i < 4; ++i) CHECK(d[i] == doctest::Approx(normals[i].dot(p - cam.position)).epsilon(1e-12));
  }
}

TEST_CASE("visibility margins subtract the threshold") {
  const RobotModel m = RobotModel::youbot_like();
  Configuration q;
  q.arm << 0.0, 0.5, 0.7, kPi / 2 - 1.2, -kPi / 2;
  const Pose cam = forward_kinematics(m, q);
  const Vec3 focus = cam.position + 2.5 * optical_axis(cam);
  const Eigen::Vector4d th = Eigen::Vector4d::Constant(0.75);
  const Eigen::Vector4d raw = plane_distances(fov_planes(cam, FieldOfView{}), focus);
  CHECK((visibility_margins(m, q, focus, FieldOfView{}, th) - (raw - th)).norm() < 1e-12);
}

TEST_CASE("visibility Jacobian matches central differences") {
  const RobotModel m = RobotModel::youbot_like();
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Configuration q = testing::random_configuration(rng, m);
    const Vec3 focus = Vec3(1.0, -0.5, 0.8) + Vec3::Random();
    const auto f = [&](const Configuration& c) {
      return Eigen::Vector4d(plane_distances(fov_planes(forward_kinematics(m, c), FieldOfView{}), focus));
    };
    worst = std::max(worst, testing::relative_error(visibility_jacobian(m, q, focus), testing::numeric_jacobian<4>(f, q)));
  }
  CHECK(worst < 1e-5);
}
