#include "viewpath/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viewpath {

void ControlParams::validate() const {
  const double gains[] = {lambda, lambda_q, alpha, gamma, lambda_d, lambda_v, lambda_phi, h, d0};
  for (double g : gains)
    if (!(g > 0.0)) throw std::invalid_argument("controller gains must be positive");
  if (delta < 0.0 || b < 0.0 || d_th < 0.0)
    throw std::invalid_argument("controller margins must be non-negative");
}

std::vector<ObstacleDistance> obstacle_distances(const Vec2& base_position,
                                                 const std::vector<Circle>& obstacles,
                                                 double footprint_radius) {
  std::vector<ObstacleDistance> out;
  out.reserve(obstacles.size());
  for (const Circle& c : obstacles) {
    const Vec2 diff = base_position - c.center;
    const double d = diff.norm();
    ObstacleDistance od;
    od.distance = d - (footprint_radius + c.radius);
    if (d < 1e-12) {
      od.degenerate = true;
    } else {
      od.gradient = Vec3(diff.x() / d, diff.y() / d, 0.0);
    }
    out.push_back(od);
  }
  return out;
}

double softmin_distance(const Eigen::VectorXd& distances, double h, double delta) {
  const double m = distances.minCoeff();
  const double s = ((-(distances.array() - m) / h).exp()).mean();
  return m - h * std::log(s) - delta;
}

Eigen::VectorXd softmin_gradient(const Eigen::VectorXd& distances,
                                 const Eigen::MatrixXd& gradients, double h) {
  const double m = distances.minCoeff();
  Eigen::VectorXd w = (-(distances.array() - m) / h).exp();
  w /= w.sum();
  return gradients.transpose() * w;
}

std::optional<Vec3> circulation_tangent(const Vec3& gradient, double eps) {
  const Vec3 t(gradient.y(), -gradient.x(), 0.0);
  const double n = t.norm();
  if (n <= eps) return std::nullopt;
  return t / n;
}

ControlQp build_qp(const RobotModel& model, const Configuration& q, const ControlTarget& target,
                   const std::vector<Circle>& obstacles, const ControlParams& params) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ControlQp out;
  const bool with_focus = target.focus.has_value();
  const int ns = with_focus ? 4 : 0;
  const int n = kDof + ns;
  out.num_slack = ns;

  const TaskVector x = task_vector(model, q);
  const Matrix6x8 jac = task_jacobian(model, q);
  Eigen::Matrix<double, 6, 1> err;
  err << x.p - target.desired.p, x.l - target.desired.l;

  QpProblem& qp = out.problem;
  qp.hessian = Eigen::MatrixXd::Zero(n, n);
  qp.gradient = Eigen::VectorXd::Zero(n);
  qp.hessian.topLeftCorner<kDof, kDof>() =
      2.0 * (jac.transpose() * jac + params.lambda_q * Eigen::Matrix<double, 8, 8>::Identity());
  qp.gradient.head<kDof>() = 2.0 * params.lambda * jac.transpose() * err;

  qp.lower = Eigen::VectorXd::Constant(n, -kInf);
  qp.upper = Eigen::VectorXd::Constant(n, kInf);
  qp.lower.head<kDof>() = -model.qdot_lim;
  qp.upper.head<kDof>() = model.qdot_lim;

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  auto add_row = [&](const Eigen::VectorXd& a, double bound) {
    rows.push_back(a);
    rhs.push_back(bound);
    return static_cast<int>(rows.size()) - 1;
  };

  // Obstacle VFI and circulation on the base, through the softmin.
  if (!obstacles.empty()) {
    const auto od = obstacle_distances(q.base_position(), obstacles, model.base_footprint_radius);
    const int no = static_cast<int>(od.size());
    Eigen::VectorXd d(no);
    Eigen::MatrixXd g(no, kBaseDof);
    bool degenerate = false;
    for (int i = 0; i < no; ++i) {
      d[i] = od[i].distance;
      g.row(i) = od[i].gradient.transpose();
      degenerate = degenerate || od[i].degenerate;
    }
    out.min_clearance = d.minCoeff();
    const double delta = params.cover_softmin_gap ? std::max(params.delta, params.h * std::log(static_cast<double>(no)))
                                                  : params.delta;
    out.softmin = softmin_distance(d, params.h, delta);
    if (degenerate) {
      out.full_stop = true;
      qp.lower.head<kBaseDof>().setZero();
      qp.upper.head<kBaseDof>().setZero();
    } else {
      const Vec3 grad = softmin_gradient(d, g, params.h);
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a.head<kBaseDof>() = -grad;
      out.vfi_row = add_row(a, params.lambda_d * out.softmin);
      if (const auto t = circulation_tangent(grad, params.circulation_eps)) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        c.head<kBaseDof>() = -*t;
        out.circulation_row = add_row(c, -beta(out.softmin, params.b, params.d0));
      }
    }
  }

  // Arm joint limits: -lambda_phi (q - q_l) <= qdot_arm <= -lambda_phi (q - q_u).
  out.joint_limit_row = static_cast<int>(rows.size());
  for (int j = 0; j < kArmDof; ++j) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a[kBaseDof + j] = -1.0;
    add_row(a, params.lambda_phi * (q.arm[j] - model.q_lower[j]));
  }
  for (int j = 0; j < kArmDof; ++j) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a[kBaseDof + j] = 1.0;
    add_row(a, -params.lambda_phi * (q.arm[j] - model.q_upper[j]));
  }

  // Soft visibility: -J_v qdot - kappa <= lambda_v d_v, kappa >= 0.
  if (with_focus) {
    const Eigen::Vector4d d_th = Eigen::Vector4d::Constant(params.d_th);
    out.visibility_margin = visibility_margins(model, q, *target.focus, params.fov, d_th);
    const Matrix4x8 jv = visibility_jacobian(model, q, *target.focus, params.fov);
    out.lambda_kappa = std::max(slack_weight(err.head<3>(), params.alpha, params.gamma),
                                params.lambda_kappa_floor);
    qp.hessian.bottomRightCorner(4, 4) = 2.0 * out.lambda_kappa * Eigen::Matrix4d::Identity();
    out.visibility_row = static_cast<int>(rows.size());
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a.head<kDof>() = -jv.row(i).transpose();
      a[kDof + i] = -1.0;
      add_row(a, params.lambda_v * out.visibility_margin[i]);
    }
    out.slack_row = static_cast<int>(rows.size());
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a[kDof + i] = -1.0;
      add_row(a, 0.0);
    }
  }

  qp.a.resize(static_cast<Eigen::Index>(rows.size()), n);
  qp.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    qp.a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    qp.b[static_cast<Eigen::Index>(i)] = rhs[i];
  }
  return out;
}

ControlOutput control_step(const RobotModel& model, const Configuration& q,
                           const ControlTarget& target, const std::vector<Circle>& obstacles,
                           const ControlParams& params) {
  const ControlQp cqp = build_qp(model, q, target, obstacles, params);
  const QpSolution sol = solve_qp(cqp.problem);

  ControlOutput out;
  ControlDiagnostics& dg = out.diagnostics;
  dg.softmin = cqp.softmin;
  dg.min_clearance = cqp.min_clearance;
  dg.visibility_margin = cqp.visibility_margin;
  dg.lambda_kappa = cqp.lambda_kappa;
  dg.full_stop = cqp.full_stop;
  dg.status = sol.status;
  dg.iterations = sol.iterations;
  const TaskVector x = task_vector(model, q);
  dg.position_error = (x.p - target.desired.p).norm();
  dg.angle_error = angle_between(x.l, target.desired.l);

  if (sol.status != QpStatus::kOptimal) return out;

  // The problem's own box already sits inside the joint limits and also holds
  // the zero base box of a full stop.
  out.qdot = sol.x.head<kDof>().cwiseMax(cqp.problem.lower.head<kDof>()).cwiseMin(cqp.problem.upper.head<kDof>());
  if (cqp.num_slack > 0) dg.kappa = sol.x.tail<4>();

  if (params.step_dt > 0.0 && !obstacles.empty() && !cqp.full_stop) {
    const double delta = params.cover_softmin_gap
                             ? std::max(params.delta, params.h * std::log(static_cast<double>(obstacles.size())))
                             : params.delta;
    auto softmin_at = [&](double s) {
      const Vec2 base(q.x + s * out.qdot[0] * params.step_dt, q.y + s * out.qdot[1] * params.step_dt);
      const auto od = obstacle_distances(base, obstacles, model.base_footprint_radius);
      Eigen::VectorXd d(od.size());
      for (std::size_t i = 0; i < od.size(); ++i) d[i] = od[i].distance;
      return softmin_distance(d, params.h, delta);
    };
    const double d0 = cqp.softmin;
    // 1 um of slack so a step that meets the row exactly is not cut back.
    const double floor = (d0 >= 0.0 ? (1.0 - params.lambda_d * params.step_dt) * d0 : d0) - 1e-6;
    double s = 1.0;
    for (int k = 0; k < 30 && softmin_at(s) < floor; ++k) s *= 0.5;
    if (softmin_at(s) < floor) s = 0.0;
    if (s < 1.0) {
      out.qdot.head<kBaseDof>() *= s;
      dg.base_scale = s;
    }
  }
  auto active = [&](int row) { return row >= 0 && sol.row_multipliers[row] > 0.0; };
  dg.vfi_active = active(cqp.vfi_row);
  dg.circulation_active = active(cqp.circulation_row);
  if (cqp.visibility_row >= 0)
    for (int i = 0; i < 4; ++i) dg.visibility_active = dg.visibility_active || active(cqp.visibility_row + i);
  return out;
}

}  // namespace viewpath
