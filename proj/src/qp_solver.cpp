#include "viewpath/qp_solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace viewpath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Constraint in the form n'x >= c, with its origin for multiplier recovery.
struct Row {
  enum Kind { kGeneral, kLower, kUpper } kind;
  int index;
};

}  // namespace

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kNotConvex: return "not_convex";
    case QpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

double QpProblem::max_violation(const Eigen::VectorXd& x) const {
  double v = 0.0;
  if (a.rows() > 0) v = std::max(v, (a * x - b).maxCoeff());
  for (int i = 0; i < x.size(); ++i) {
    if (lower.size() == x.size()) v = std::max(v, lower[i] - x[i]);
    if (upper.size() == x.size()) v = std::max(v, x[i] - upper[i]);
  }
  return v;
}

QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings) {
  const int n = problem.size();
  QpSolution sol;
  sol.row_multipliers = Eigen::VectorXd::Zero(problem.a.rows());
  sol.lower_multipliers = Eigen::VectorXd::Zero(n);
  sol.upper_multipliers = Eigen::VectorXd::Zero(n);

  // Gather constraints as n_i'x >= c_i.
  std::vector<Row> rows;
  const int m_general = static_cast<int>(problem.a.rows());
  for (int i = 0; i < m_general; ++i) rows.push_back({Row::kGeneral, i});
  const bool has_lower = problem.lower.size() == n;
  const bool has_upper = problem.upper.size() == n;
  for (int i = 0; i < n; ++i) {
    if (has_lower && problem.lower[i] > -kInf) rows.push_back({Row::kLower, i});
    if (has_upper && problem.upper[i] < kInf) rows.push_back({Row::kUpper, i});
  }
  const int m = static_cast<int>(rows.size());
  Eigen::MatrixXd normals(n, m);
  Eigen::VectorXd bounds(m);
  for (int k = 0; k < m; ++k) {
    const Row& r = rows[k];
    normals.col(k).setZero();
    switch (r.kind) {
      case Row::kGeneral:
        normals.col(k) = -problem.a.row(r.index).transpose();
        bounds[k] = -problem.b[r.index];
        break;
      case Row::kLower:
        normals(r.index, k) = 1.0;
        bounds[k] = problem.lower[r.index];
        break;
      case Row::kUpper:
        normals(r.index, k) = -1.0;
        bounds[k] = -problem.upper[r.index];
        break;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(problem.hessian);
  if (llt.info() != Eigen::Success) {
    sol.status = QpStatus::kNotConvex;
    sol.x = Eigen::VectorXd::Zero(n);
    return sol;
  }
  const Eigen::MatrixXd l_factor = llt.matrixL();

  Eigen::VectorXd x = llt.solve(-problem.gradient);
  std::vector<int> active;
  std::vector<double> mult;

  Eigen::MatrixXd j_mat;  // L^-T Q
  Eigen::MatrixXd r_mat;  // q x q upper triangular
  auto refactor = [&]() {
    const int q = static_cast<int>(active.size());
    Eigen::MatrixXd b_mat(n, q);
    for (int k = 0; k < q; ++k) b_mat.col(k) = normals.col(active[k]);
    Eigen::MatrixXd q_full = Eigen::MatrixXd::Identity(n, n);
    if (q > 0) {
      b_mat = l_factor.triangularView<Eigen::Lower>().solve(b_mat);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(b_mat);
      q_full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
      r_mat = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
    } else {
      r_mat.resize(0, 0);
    }
    j_mat = l_factor.transpose().triangularView<Eigen::Upper>().solve(q_full);
  };

  const int max_iter = settings.max_iterations > 0 ? settings.max_iterations : 20 * (n + m) + 20;
  const double tol = settings.feasibility_tol;
  int iter = 0;
  refactor();

  while (true) {
    // Most violated constraint, lowest index on ties.
    int p = -1;
    double worst = -tol;
    for (int k = 0; k < m; ++k) {
      const double s = normals.col(k).dot(x) - bounds[k];
      const double scale = 1.0 + std::abs(bounds[k]);
      if (s / scale < worst) {
        worst = s / scale;
        p = k;
      }
    }
    if (p < 0) {
      sol.status = QpStatus::kOptimal;
      break;
    }

    double u_p = 0.0;
    bool added = false;
    while (!added) {
      if (++iter > max_iter) {
        sol.status = QpStatus::kIterationLimit;
        sol.x = x;
        sol.iterations = iter;
        sol.objective = problem.objective(x);
        return sol;
      }
      const int q = static_cast<int>(active.size());
      const Eigen::VectorXd d = j_mat.transpose() * normals.col(p);
      const Eigen::VectorXd z = j_mat.rightCols(n - q) * d.tail(n - q);
      Eigen::VectorXd r;
      if (q > 0) r = r_mat.triangularView<Eigen::Upper>().solve(d.head(q));

      double t1 = kInf;
      int drop = -1;
      for (int k = 0; k < q; ++k) {
        if (r[k] > 1e-12) {
          const double ratio = mult[k] / r[k];
          if (ratio < t1) {
            t1 = ratio;
            drop = k;
          }
        }
      }
      double t2 = kInf;
      const double zn = z.dot(normals.col(p));
      if (z.norm() > 1e-12 && zn > 1e-14) t2 = -(normals.col(p).dot(x) - bounds[p]) / zn;
      const double t = std::min(t1, t2);

      if (t == kInf) {
        sol.status = QpStatus::kInfeasible;
        sol.x = x;
        sol.iterations = iter;
        sol.objective = problem.objective(x);
        return sol;
      }
      if (t2 == kInf) {
        for (int k = 0; k < q; ++k) mult[k] -= t * r[k];
        u_p += t;
        active.erase(active.begin() + drop);
        mult.erase(mult.begin() + drop);
        refactor();
        continue;
      }
      x += t * z;
      for (int k = 0; k < q; ++k) mult[k] -= t * r[k];
      u_p += t;
      if (t2 <= t1) {
        active.push_back(p);
        mult.push_back(u_p);
        refactor();
        added = true;
      } else {
        active.erase(active.begin() + drop);
        mult.erase(mult.begin() + drop);
        refactor();
      }
    }
  }

  sol.x = x;
  sol.iterations = iter;
  sol.objective = problem.objective(x);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const Row& r = rows[active[k]];
    const double u = std::max(0.0, mult[k]);
    switch (r.kind) {
      case Row::kGeneral: sol.row_multipliers[r.index] = u; break;
      case Row::kLower: sol.lower_multipliers[r.index] = u; break;
      case Row::kUpper: sol.upper_multipliers[r.index] = u; break;
    }
  }
  return sol;
}

double kkt_residual(const QpProblem& problem, const QpSolution& solution) {
  Eigen::VectorXd grad = problem.hessian * solution.x + problem.gradient;
  if (problem.a.rows() > 0) grad += problem.a.transpose() * solution.row_multipliers;
  grad -= solution.lower_multipliers;
  grad += solution.upper_multipliers;
  return grad.lpNorm<Eigen::Infinity>();
}

}  // namespace viewpath
