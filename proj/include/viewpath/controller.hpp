#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "viewpath/kinematics.hpp"
#include "viewpath/qp_solver.hpp"
#include "viewpath/visibility.hpp"

namespace viewpath {

struct ControlParams {
  double lambda = 5.0;        // task gain
  double lambda_q = 0.01;     // joint-velocity damping
  double alpha = 5.0;         // slack weight law: alpha * |p_err|^gamma
  double gamma = 2.0;        // quadratic: no slack equilibria close to the goal
  double lambda_kappa_floor = 1e-6;  // keeps the slack block strictly convex at the goal
  double lambda_d = 1.0;      // obstacle VFI gain
  double lambda_v = 1.0;      // visibility gain
  double lambda_phi = 1.0;    // joint-limit gain
  double b = 0.044;           // circulation speed, m/s
  double d0 = 0.14;           // circulation activation distance, m
  double delta = 0.05;        // softmin margin, m
  double h = 0.03;            // softmin temperature
  // Raise the margin to h ln N when that is larger, so D >= 0 bounds the true
  // minimum clearance (the 1/N mean lets softmin exceed min by up to h ln N).
  bool cover_softmin_gap = true;
  // Control period. When > 0 the base step is shortened until the softmin
  // distance after one Euler step obeys the discrete VFI
  // D(k+1) >= (1 - lambda_d dt) D(k); the linearised row alone lets the base
  // cut curved boundary corners by the second-order term.
  double step_dt = 0.0;
  double d_th = 0.75;         // visibility threshold for all four planes, m
  double circulation_eps = 1e-9;
  FieldOfView fov;

  void validate() const;
};

/// Per-obstacle clearance d_i - (R_r + R_o) and its gradient w.r.t.
/// (x, y, theta). `degenerate` is set when the base sits on an obstacle centre.
struct ObstacleDistance {
  double distance = 0.0;
  Vec3 gradient = Vec3::Zero();
  bool degenerate = false;
};

std::vector<ObstacleDistance> obstacle_distances(const Vec2& base_position,
                                                 const std::vector<Circle>& obstacles,
                                                 double footprint_radius);

/// -h ln(mean(exp(-d_i/h))) - delta, shifted by min(d) for stability.
double softmin_distance(const Eigen::VectorXd& distances, double h, double delta);

/// Softmax-weighted average of the per-obstacle gradients (rows of `gradients`).
Eigen::VectorXd softmin_gradient(const Eigen::VectorXd& distances,
                                 const Eigen::MatrixXd& gradients, double h);

/// Normalized Omega * grad; empty when the planar part vanishes.
std::optional<Vec3> circulation_tangent(const Vec3& gradient, double eps = 1e-9);

inline double beta(double d, double b, double d0) { return b * (1.0 - d / d0); }

inline double slack_weight(const Vec3& p_err, double alpha, double gamma) {
  return alpha * std::pow(p_err.norm(), gamma);
}

struct ControlTarget {
  TaskVector desired;
  std::optional<Vec3> focus;
};

/// The assembled QP with its row layout. Decision vector is (qdot, kappa).
struct ControlQp {
  QpProblem problem;
  int num_slack = 0;
  int vfi_row = -1;
  int circulation_row = -1;
  int joint_limit_row = -1;  // first of 10
  int visibility_row = -1;   // first of 4
  int slack_row = -1;        // first of 4 (kappa >= 0)

  // Quantities evaluated while building, reported in diagnostics.
  double softmin = std::numeric_limits<double>::quiet_NaN();
  double min_clearance = std::numeric_limits<double>::quiet_NaN();
  Eigen::Vector4d visibility_margin = Eigen::Vector4d::Constant(std::numeric_limits<double>::quiet_NaN());
  double lambda_kappa = 0.0;
  bool full_stop = false;
};

ControlQp build_qp(const RobotModel& model, const Configuration& q, const ControlTarget& target,
                   const std::vector<Circle>& obstacles, const ControlParams& params);

struct ControlDiagnostics {
  double softmin = std::numeric_limits<double>::quiet_NaN();
  double min_clearance = std::numeric_limits<double>::quiet_NaN();
  Eigen::Vector4d visibility_margin = Eigen::Vector4d::Constant(std::numeric_limits<double>::quiet_NaN());
  Eigen::Vector4d kappa = Eigen::Vector4d::Zero();
  double lambda_kappa = 0.0;
  double position_error = 0.0;
  double angle_error = 0.0;
  QpStatus status = QpStatus::kOptimal;
  bool vfi_active = false;
  bool circulation_active = false;
  bool visibility_active = false;
  bool full_stop = false;
  double base_scale = 1.0;  // backtracking factor applied to the base velocity
  int iterations = 0;
};

struct ControlOutput {
  Vector8 qdot = Vector8::Zero();
  ControlDiagnostics diagnostics;
};

/// One control cycle: build, solve, clamp. On solver failure qdot is zero.
ControlOutput control_step(const RobotModel& model, const Configuration& q,
                           const ControlTarget& target, const std::vector<Circle>& obstacles,
                           const ControlParams& params);

}  // namespace viewpath
