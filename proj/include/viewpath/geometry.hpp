#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace viewpath {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector5 = Eigen::Matrix<double, 5, 1>;
using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix3x8 = Eigen::Matrix<double, 3, 8>;
using Matrix4x8 = Eigen::Matrix<double, 4, 8>;
using Matrix6x8 = Eigen::Matrix<double, 6, 8>;

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// Rigid transform: world_point = rotation * local_point + position.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();

  Vec3 apply(const Vec3& local) const { return rotation * local + position; }
};

/// Camera optical frame convention: +z forward, +x right, +y down.
inline Vec3 optical_axis(const Pose& camera) { return camera.rotation.col(2); }

/// Level camera orientation (no roll) looking along `forward`.
/// Falls back to world +x as the right axis when `forward` is vertical.
inline Mat3 look_rotation(const Vec3& forward) {
  const Vec3 z = forward.normalized();
  Vec3 x = z.cross(Vec3::UnitZ());
  if (x.norm() < 1e-9) x = Vec3::UnitX();
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return r;
}

/// Angle between two (not necessarily unit) vectors, radians.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Rotation matrix from roll/pitch/yaw (fixed axes x, y, z).
inline Mat3 rpy_to_matrix(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
          Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

/// Circle on the ground plane.
struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Vec3 center() const { return 0.5 * (min + max); }
};

}  // namespace viewpath
