#pragma once

#include <array>

#include "viewpath/kinematics.hpp"
#include "viewpath/voxel_world.hpp"

namespace viewpath {

/// Plane order used throughout: left, right, top, bottom.
enum class FovPlane { kLeft = 0, kRight = 1, kTop = 2, kBottom = 3 };

/// The four lateral planes of a camera frustum, all through the camera
/// centre, with unit normals pointing into the frustum.
struct FovPlanes {
  std::array<Vec3, 4> normals{};
  Vec3 apex = Vec3::Zero();
  double half_horizontal = deg2rad(37.0);
  double half_vertical = deg2rad(30.0);
};

/// Inward normals expressed in the camera optical frame.
std::array<Vec3, 4> camera_frame_normals(const FieldOfView& fov);

FovPlanes fov_planes(const Pose& camera, const FieldOfView& fov = {});

/// Signed distances n_i . (p - apex), inward positive.
Eigen::Vector4d plane_distances(const FovPlanes& planes, const Vec3& point);

/// d_v - d_th for a focus point fixed in the world.
Eigen::Vector4d visibility_margins(const RobotModel& model, const Configuration& q,
                                   const Vec3& focus, const FieldOfView& fov,
                                   const Eigen::Vector4d& d_th);

/// d(d_v)/dq for a focus point fixed in the world; planes move with the
/// camera.
Matrix4x8 visibility_jacobian(const RobotModel& model, const Configuration& q, const Vec3& focus,
                              const FieldOfView& fov = {});

}  // namespace viewpath
