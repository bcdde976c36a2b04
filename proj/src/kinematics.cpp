#include "viewpath/kinematics.hpp"

#include <stdexcept>

namespace viewpath {

namespace {

Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.position + a.position};
}

Pose translation(double x, double y, double z) {
  Pose p;
  p.position = Vec3(x, y, z);
  return p;
}

}  // namespace

RobotModel RobotModel::youbot_like() {
  RobotModel m;
  m.base_footprint_radius = 0.25;
  m.arm_chain[0] = {translation(0.143, 0.0, 0.246), Vec3::UnitZ()};
  m.arm_chain[1] = {translation(0.033, 0.0, 0.019), Vec3::UnitY()};
  m.arm_chain[2] = {translation(0.0, 0.0, 0.155), Vec3::UnitY()};
  m.arm_chain[3] = {translation(0.0, 0.0, 0.135), Vec3::UnitY()};
  m.arm_chain[4] = {translation(0.0, 0.0, 0.081), Vec3::UnitZ()};
  m.camera_offset = translation(0.0, 0.0, 0.05);
  m.qdot_lim << 0.5, 0.5, 0.8, 1.0, 1.0, 1.0, 1.0, 1.0;
  m.q_lower << -2.95, -1.13, -2.60, -1.78, -2.90;
  m.q_upper << 2.95, 1.57, 2.55, 1.78, 2.90;
  return m;
}

void RobotModel::validate() const {
  if (!(base_footprint_radius > 0.0))
    throw std::invalid_argument("footprint radius must be positive");
  for (int i = 0; i < kArmDof; ++i) {
    if (!(q_lower[i] < q_upper[i]))
      throw std::invalid_argument("joint limits must satisfy lower < upper");
    if (q_lower[i] <= -kPi || q_upper[i] >= kPi)
      throw std::invalid_argument("joint limits must lie in (-pi, pi)");
    if (std::abs(arm_chain[i].axis.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("joint axes must be unit vectors");
  }
  if (!(qdot_lim.array() > 0.0).all())
    throw std::invalid_argument("velocity limits must be positive");
}

Vector8 Configuration::vector() const {
  Vector8 q;
  q << x, y, theta, arm;
  return q;
}

Configuration Configuration::from_vector(const Vector8& q) {
  Configuration c;
  c.x = q[0];
  c.y = q[1];
  c.theta = q[2];
  c.arm = q.tail<5>();
  return c;
}

ChainFrames chain_frames(const RobotModel& model, const Configuration& q) {
  ChainFrames frames;
  Pose t;
  t.rotation = Eigen::AngleAxisd(q.theta, Vec3::UnitZ()).toRotationMatrix();
  t.position = Vec3(q.x, q.y, 0.0);
  for (int i = 0; i < kArmDof; ++i) {
    const JointDescriptor& j = model.arm_chain[i];
    t = compose(t, j.origin);
    frames.joint_origin[i] = t.position;
    frames.joint_axis[i] = t.rotation * j.axis;
    Pose rot;
    rot.rotation = Eigen::AngleAxisd(q.arm[i], j.axis).toRotationMatrix();
    t = compose(t, rot);
  }
  frames.camera = compose(t, model.camera_offset);
  return frames;
}

Pose forward_kinematics(const RobotModel& model, const Configuration& q) {
  return chain_frames(model, q).camera;
}

TaskVector task_vector(const RobotModel& model, const Configuration& q) {
  const Pose cam = forward_kinematics(model, q);
  return {cam.position, optical_axis(cam).normalized()};
}

Matrix3x8 angular_jacobian(const RobotModel& model, const Configuration& q) {
  const ChainFrames f = chain_frames(model, q);
  Matrix3x8 j = Matrix3x8::Zero();
  j.col(2) = Vec3::UnitZ();
  for (int i = 0; i < kArmDof; ++i) j.col(kBaseDof + i) = f.joint_axis[i];
  return j;
}

Matrix3x8 translation_jacobian(const RobotModel& model, const Configuration& q) {
  const ChainFrames f = chain_frames(model, q);
  const Vec3& p = f.camera.position;
  Matrix3x8 j = Matrix3x8::Zero();
  j.col(0) = Vec3::UnitX();
  j.col(1) = Vec3::UnitY();
  j.col(2) = Vec3::UnitZ().cross(p - Vec3(q.x, q.y, 0.0));
  for (int i = 0; i < kArmDof; ++i)
    j.col(kBaseDof + i) = f.joint_axis[i].cross(p - f.joint_origin[i]);
  return j;
}

Matrix3x8 direction_jacobian(const RobotModel& model, const Configuration& q) {
  const Matrix3x8 w = angular_jacobian(model, q);
  const Vec3 l = task_vector(model, q).l;
  Matrix3x8 j;
  for (int c = 0; c < kDof; ++c) j.col(c) = Vec3(w.col(c)).cross(l);
  return j;
}

Matrix6x8 task_jacobian(const RobotModel& model, const Configuration& q) {
  Matrix6x8 j;
  j.topRows<3>() = translation_jacobian(model, q);
  j.bottomRows<3>() = direction_jacobian(model, q);
  return j;
}

Configuration integrate(const Configuration& q, const Vector8& qdot, double dt) {
  Configuration out = Configuration::from_vector(q.vector() + qdot * dt);
  out.theta = wrap_angle(out.theta);
  for (int i = 0; i < kArmDof; ++i) out.arm[i] = wrap_angle(out.arm[i]);
  return out;
}

}  // namespace viewpath
