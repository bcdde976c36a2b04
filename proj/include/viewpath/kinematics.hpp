#pragma once

#include <array>
#include <string>

#include "viewpath/geometry.hpp"

namespace viewpath {

inline constexpr int kDof = 8;
inline constexpr int kBaseDof = 3;
inline constexpr int kArmDof = 5;

/// One revolute joint: a fixed transform from the previous link frame to the
/// joint frame, followed by a rotation about `axis` (joint frame).
struct JointDescriptor {
  Pose origin;
  Vec3 axis = Vec3::UnitZ();
};

/// Holonomic planar base carrying a 5-revolute arm with a camera at the tip.
struct RobotModel {
  double base_footprint_radius = 0.25;
  std::array<JointDescriptor, kArmDof> arm_chain{};
  Pose camera_offset;
  Vector8 qdot_lim = Vector8::Ones();
  Vector5 q_lower = Vector5::Constant(-2.9);
  Vector5 q_upper = Vector5::Constant(2.9);

  /// Default youBot-like platform shipped in config/robot_youbot.json.
  static RobotModel youbot_like();

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

/// Generalized coordinates: base (x, y, theta) followed by 5 arm angles.
struct Configuration {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  Vector5 arm = Vector5::Zero();

  Vector8 vector() const;
  static Configuration from_vector(const Vector8& q);
  Vec2 base_position() const { return {x, y}; }
};

/// Camera position p and unit optical-axis direction l, world frame.
struct TaskVector {
  Vec3 p = Vec3::Zero();
  Vec3 l = Vec3::UnitZ();

  Eigen::Matrix<double, 6, 1> stacked() const {
    Eigen::Matrix<double, 6, 1> x;
    x << p, l;
    return x;
  }
};

/// Frames produced while walking the chain; used by the Jacobians.
struct ChainFrames {
  std::array<Vec3, kArmDof> joint_origin{};
  std::array<Vec3, kArmDof> joint_axis{};  // world frame, unit
  Pose camera;
};

ChainFrames chain_frames(const RobotModel& model, const Configuration& q);

Pose forward_kinematics(const RobotModel& model, const Configuration& q);

TaskVector task_vector(const RobotModel& model, const Configuration& q);

/// Angular-velocity Jacobian of the camera frame (world frame, 3x8).
Matrix3x8 angular_jacobian(const RobotModel& model, const Configuration& q);

/// dp/dq.
Matrix3x8 translation_jacobian(const RobotModel& model, const Configuration& q);

/// dl/dq.
Matrix3x8 direction_jacobian(const RobotModel& model, const Configuration& q);

/// Stacked [J_p; J_l].
Matrix6x8 task_jacobian(const RobotModel& model, const Configuration& q);

/// Explicit Euler step with angle wrapping on theta and the arm joints.
Configuration integrate(const Configuration& q, const Vector8& qdot, double dt);

/// Robot description file (JSON); schema documented in README.
RobotModel load_robot_model(const std::string& path);
RobotModel parse_robot_model(const std::string& json_text);

}  // namespace viewpath
