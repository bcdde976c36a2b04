#include "viewpath/visibility.hpp"

namespace viewpath {

std::array<Vec3, 4> camera_frame_normals(const FieldOfView& fov) {
  const double h = deg2rad(fov.horizontal_deg) / 2.0;
  const double v = deg2rad(fov.vertical_deg) / 2.0;
  // The optical axis (z) tilted by 90 deg - half angle away from each
  // boundary plane. Camera x points right, y points down.
  return {Vec3(std::cos(h), 0.0, std::sin(h)),    // left plane: normal leans right
          Vec3(-std::cos(h), 0.0, std::sin(h)),   // right plane
          Vec3(0.0, std::cos(v), std::sin(v)),    // top plane: normal leans down
          Vec3(0.0, -std::cos(v), std::sin(v))};  // bottom plane
}

FovPlanes fov_planes(const Pose& camera, const FieldOfView& fov) {
  FovPlanes planes;
  const auto local = camera_frame_normals(fov);
  for (int i = 0; i < 4; ++i) planes.normals[i] = camera.rotation * local[i];
  planes.apex = camera.position;
  planes.half_horizontal = deg2rad(fov.horizontal_deg) / 2.0;
  planes.half_vertical = deg2rad(fov.vertical_deg) / 2.0;
  return planes;
}

Eigen::Vector4d plane_distances(const FovPlanes& planes, const Vec3& point) {
  Eigen::Vector4d d;
  for (int i = 0; i < 4; ++i) d[i] = planes.normals[i].dot(point - planes.apex);
  return d;
}

Eigen::Vector4d visibility_margins(const RobotModel& model, const Configuration& q,
                                   const Vec3& focus, const FieldOfView& fov,
                                   const Eigen::Vector4d& d_th) {
  return plane_distances(fov_planes(forward_kinematics(model, q), fov), focus) - d_th;
}

Matrix4x8 visibility_jacobian(const RobotModel& model, const Configuration& q, const Vec3& focus,
                              const FieldOfView& fov) {
  const Pose cam = forward_kinematics(model, q);
  const FovPlanes planes = fov_planes(cam, fov);
  const Matrix3x8 jp = translation_jacobian(model, q);
  const Matrix3x8 jw = angular_jacobian(model, q);
  const Vec3 rel = focus - cam.position;
  Matrix4x8 jv;
  for (int i = 0; i < 4; ++i) {
    const Vec3& n = planes.normals[i];
    for (int c = 0; c < kDof; ++c) {
      const Vec3 dn = Vec3(jw.col(c)).cross(n);
      jv(i, c) = dn.dot(rel) - n.dot(jp.col(c));
    }
  }
  return jv;
}

}  // namespace viewpath
