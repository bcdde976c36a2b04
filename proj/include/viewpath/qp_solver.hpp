#pragma once

#include <Eigen/Dense>

namespace viewpath {

/// minimize 0.5 x'Hx + g'x  subject to  A x <= b,  lower <= x <= upper.
/// Bounds may be +-infinity.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int size() const { return static_cast<int>(gradient.size()); }
  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(hessian * x) + gradient.dot(x);
  }
  /// Largest violation over rows and bounds (0 when feasible).
  double max_violation(const Eigen::VectorXd& x) const;
};

enum class QpStatus { kOptimal, kInfeasible, kNotConvex, kIterationLimit };

const char* to_string(QpStatus s);

struct QpSettings {
  double feasibility_tol = 1e-9;
  int max_iterations = 0;  // 0: 20 * (n + constraints)
};

struct QpSolution {
  QpStatus status = QpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  /// Multipliers of the rows of A (>= 0), then of the lower and upper bounds.
  Eigen::VectorXd row_multipliers;
  Eigen::VectorXd lower_multipliers;
  Eigen::VectorXd upper_multipliers;
};

/// Dual active-set method (Goldfarb-Idnani) for strictly convex QPs. The
/// active-set factorization is rebuilt from scratch on every change, which is
/// cheap at the sizes used here and keeps the result deterministic.
QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings = {});

/// Stationarity residual ||Hx + g + A'y - mu_l + mu_u||_inf of a solution.
double kkt_residual(const QpProblem& problem, const QpSolution& solution);

}  // namespace viewpath
