#include <doctest.h>

#include "test_support.hpp"

using namespace viewpath;
using testing::numeric_jacobian;
using testing::relative_error;

TEST_CASE("forward kinematics at the zero pose stacks the link offsets") {
  const RobotModel m = RobotModel::youbot_like();
  Configuration q;
  const Pose cam = forward_kinematics(m, q);
  // Offsets add up along z; x picks up the two horizontal offsets.
  CHECK(cam.position.x() == doctest::Approx(0.176));
  CHECK(cam.position.y() == doctest::Approx(0.0));
  CHECK(cam.position.z() == doctest::Approx(0.246 + 0.019 + 0.155 + 0.135 + 0.081 + 0.05));
  CHECK(optical_axis(cam).z() == doctest::Approx(1.0));
}

TEST_CASE("base translation and yaw move the camera rigidly") {
  const RobotModel m = RobotModel::youbot_like();
  std::mt19937_64 rng(3);
  Configuration q = testing::random_configuration(rng, m);
  const Pose a = forward_kinematics(m, q);
  Configuration moved = q;
  moved.x += 1.0;
  moved.y -= 0.5;
  const Pose b = forward_kinematics(m, moved);
  CHECK((b.position - a.position - Vec3(1.0, -0.5, 0.0)).norm() < 1e-12);
  CHECK((b.rotation - a.rotation).norm() < 1e-12);
}

TEST_CASE("task Jacobians match central differences over random states") {
  const RobotModel m = RobotModel::youbot_like();
  std::mt19937_64 rng(11);
  double worst_p = 0.0, worst_l = 0.0, worst_w = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Configuration q = testing::random_configuration(rng, m);
    const auto fp = [&](const Configuration& c) { return Vec3(task_vector(m, c).p); };
    const auto fl = [&](const Configuration& c) { return Vec3(task_vector(m, c).l); };
    worst_p = std::max(worst_p, relative_error(translation_jacobian(m, q), numeric_jacobian<3>(fp, q)));
    worst_l = std::max(worst_l, relative_error(direction_jacobian(m, q), numeric_jacobian<3>(fl, q)));

    // Angular velocity from the rotation increment R(q+h) R(q-h)^T.
    Matrix3x8 w_num;
    const double h = 1e-6;
    for (int i = 0; i < 8; ++i) {
      Vector8 a = q.vector(), b = q.vector();
      a[i] += h;
      b[i] -= h;
      const Mat3 dr = forward_kinematics(m, Configuration::from_vector(a)).rotation *
                      forward_kinematics(m, Configuration::from_vector(b)).rotation.transpose();
      const Eigen::AngleAxisd aa(dr);
      w_num.col(i) = aa.axis() * aa.angle() / (2.0 * h);
    }
    worst_w = std::max(worst_w, relative_error(angular_jacobian(m, q), w_num));
  }
  CHECK(worst_p < 1e-5);
  CHECK(worst_l < 1e-5);
  CHECK(worst_w < 1e-5);
}

TEST_CASE("stacked task Jacobian is [J_p; J_l]") {
  const RobotModel m = RobotModel::youbot_like();
  std::mt19937_64 rng(5);
  const Configuration q = testing::random_configuration(rng, m);
  const Matrix6x8 j = task_jacobian(m, q);
  CHECK((j.topRows<3>() - translation_jacobian(m, q)).norm() == 0.0);
  CHECK((j.bottomRows<3>() - direction_jacobian(m, q)).norm() == 0.0);
}

TEST_CASE("direction stays unit length") {
  const RobotModel m = RobotModel::youbot_like();
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i)
    CHECK(task_vector(m, testing::random_configuration(rng, m)).l.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integrate wraps theta and applies Euler steps") {
  Configuration q;
  q.theta = kPi - 0.01;
  Vector8 v = Vector8::Zero();
  v[0] = 1.0;
  v[2] = 1.0;
  const Configuration r = integrate(q, v, 0.02);
  CHECK(r.x == doctest::Approx(0.02));
  CHECK(r.theta == doctest::Approx(-kPi + 0.01));
}

TEST_CASE("robot description loads and matches the built-in model") {
  const RobotModel file = load_robot_model(testing::source_path("config/robot_youbot.json"));
  const RobotModel ref = RobotModel::youbot_like();
  CHECK(file.base_footprint_radius == ref.base_footprint_radius);
  CHECK((file.qdot_lim - ref.qdot_lim).norm() == 0.0);
  CHECK((file.q_lower - ref.q_lower).norm() == 0.0);
  Configuration q;
  q.arm << 0.3, 0.2, -0.4, 0.5, 0.1;
  CHECK((forward_kinematics(file, q).position - forward_kinematics(ref, q).position).norm() < 1e-12);
}

TEST_CASE("invalid robot descriptions are rejected") {
  CHECK_THROWS_AS(parse_robot_model("{"), std::invalid_argument);
  RobotModel m = RobotModel::youbot_like();
  m.q_lower[0] = 1.0;
  m.q_upper[0] = 0.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = RobotModel::youbot_like();
  m.qdot_lim[3] = 0.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}
