#pragma once

// Small dense linear programs with few free variables and many constraints:
//
//   maximize c.x  subject to  A x <= b,  x in R^p free.
//
// Solved through the standard-form dual  min b.y  s.t.  A^T y = c, y >= 0,  which has
// only p rows, by a two-phase revised simplex with Bland's rule. The primal optimum is
// read off the simplex multipliers of the final dual basis.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace c11fit {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double value = -std::numeric_limits<double>::infinity();
};

namespace detail {

class DualSimplex {
 public:
  DualSimplex(const Eigen::MatrixXd& At, const Eigen::VectorXd& rhs, double tol) : At_(At), rhs_(rhs), tol_(tol) {}

  // Returns false when the problem is unbounded below.
  bool run(std::vector<Eigen::Index>& basis, const Eigen::VectorXd& cost, std::size_t max_iters) {
    const Eigen::Index p = At_.rows();
    const Eigen::Index ncols = At_.cols();
    for (std::size_t it = 0; it < max_iters; ++it) {
      Eigen::MatrixXd Bm(p, p);
      Eigen::VectorXd cb(p);
      for (Eigen::Index r = 0; r < p; ++r) {
        Bm.col(r) = At_.col(basis[static_cast<std::size_t>(r)]);
        cb(r) = cost(basis[static_cast<std::size_t>(r)]);
      }
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bm);
      const Eigen::VectorXd xb = lu.solve(rhs_);
      const Eigen::VectorXd pi = lu.transpose().solve(cb);

      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < ncols; ++j) {
        if (is_basic(basis, j)) continue;
        const double rc = cost(j) - pi.dot(At_.col(j));
        if (rc < -tol_ * (1.0 + std::abs(cost(j)))) {
          enter = j;
          break;
        }
      }
      if (enter < 0) {
        pi_ = pi;
        xb_ = xb;
        return true;
      }
      const Eigen::VectorXd u = lu.solve(At_.col(enter));
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < p; ++r) {
        if (u(r) > tol_) {
          const double ratio = std::max(xb(r), 0.0) / u(r);
          if (ratio < best - 1e-15 ||
              (ratio <= best + 1e-15 && leave >= 0 && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;
      basis[static_cast<std::size_t>(leave)] = enter;
    }
    throw std::runtime_error("lp: iteration limit reached");
  }

  const Eigen::VectorXd& multipliers() const { return pi_; }
  const Eigen::VectorXd& basic_values() const { return xb_; }

 private:
  static bool is_basic(const std::vector<Eigen::Index>& basis, Eigen::Index j) {
    for (auto b : basis)
      if (b == j) return true;
    return false;
  }

  const Eigen::MatrixXd& At_;
  const Eigen::VectorXd& rhs_;
  double tol_;
  Eigen::VectorXd pi_, xb_;
};

}  // namespace detail

/// maximize c.x s.t. A x <= b with x free. Intended for p <= ~10 variables.
inline LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         double tol = 1e-11) {
  const Eigen::Index p = c.size();
  const Eigen::Index m = A.rows();
  if (A.cols() != p || b.size() != m) throw std::invalid_argument("solve_lp: dimension mismatch");

  LpResult res;
  if (p == 0) {
    res.status = (b.array() >= -tol).all() ? LpStatus::optimal : LpStatus::infeasible;
    res.x = Eigen::VectorXd(0);
    res.value = 0.0;
    return res;
  }

  // Dual rows (one per primal variable), flipped so the right-hand side is >= 0,
  // followed by one artificial column per row.
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(p);
  for (Eigen::Index r = 0; r < p; ++r)
    if (c(r) < 0) sign(r) = -1.0;
  Eigen::MatrixXd At(p, m + p);
  At.leftCols(m) = sign.asDiagonal() * A.transpose();
  At.rightCols(p).setIdentity();
  Eigen::VectorXd rhs = sign.cwiseProduct(c);

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(m + p);
  phase1.tail(p).setOnes();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(p));
  for (Eigen::Index r = 0; r < p; ++r) basis[static_cast<std::size_t>(r)] = m + r;

  const std::size_t max_iters = 50 * static_cast<std::size_t>(m + p) + 1000;
  {
    detail::DualSimplex s1(At, rhs, tol);
    s1.run(basis, phase1, max_iters);
    double art = 0.0;
    for (Eigen::Index r = 0; r < p; ++r)
      if (basis[static_cast<std::size_t>(r)] >= m) art += std::max(0.0, s1.basic_values()(r));
    if (art > 1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) {
      // Dual infeasible: the primal (which we assume feasible) is unbounded, or infeasible.
      res.status = LpStatus::unbounded;
      return res;
    }
  }

  // Drive zero-level artificials out of the basis; rows where that fails are redundant.
  std::vector<bool> keep(static_cast<std::size_t>(p), true);
  std::vector<bool> drop_pos(static_cast<std::size_t>(p), false);
  for (Eigen::Index r = 0; r < p; ++r) {
    if (basis[static_cast<std::size_t>(r)] < m) continue;
    Eigen::MatrixXd Bm(p, p);
    for (Eigen::Index q = 0; q < p; ++q) Bm.col(q) = At.col(basis[static_cast<std::size_t>(q)]);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bm);
    bool swapped = false;
    for (Eigen::Index j = 0; j < m && !swapped; ++j) {
      bool basic = false;
      for (auto bj : basis) basic = basic || (bj == j);
      if (basic) continue;
      const Eigen::VectorXd u = lu.solve(At.col(j));
      if (std::abs(u(r)) > 1e-9) {
        basis[static_cast<std::size_t>(r)] = j;
        swapped = true;
      }
    }
    if (!swapped) {
      // The artificial e_q is basic; row q is a combination of the other rows.
      keep[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)] - m)] = false;
      drop_pos[static_cast<std::size_t>(r)] = true;
    }
  }

  // Reduced system without the redundant rows and without artificial columns.
  std::vector<Eigen::Index> rows;
  for (Eigen::Index r = 0; r < p; ++r)
    if (keep[static_cast<std::size_t>(r)]) rows.push_back(r);
  const auto pr = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  if (pr == 0) {
    res.status = (b.array() >= -tol).all() ? LpStatus::optimal : LpStatus::infeasible;
    res.x = x;
    res.value = 0.0;
    return res;
  }
  Eigen::MatrixXd At2(pr, m);
  Eigen::VectorXd rhs2(pr);
  for (Eigen::Index q = 0; q < pr; ++q) {
    At2.row(q) = At.row(rows[static_cast<std::size_t>(q)]).leftCols(m);
    rhs2(q) = rhs(rows[static_cast<std::size_t>(q)]);
  }
  std::vector<Eigen::Index> basis2;
  for (Eigen::Index r = 0; r < p; ++r)
    if (!drop_pos[static_cast<std::size_t>(r)]) basis2.push_back(basis[static_cast<std::size_t>(r)]);

  const Eigen::VectorXd phase2 = b;
  detail::DualSimplex s2(At2, rhs2, tol);
  if (!s2.run(basis2, phase2, max_iters)) {
    res.status = LpStatus::infeasible;
    return res;
  }
  for (Eigen::Index q = 0; q < pr; ++q) {
    const Eigen::Index r = rows[static_cast<std::size_t>(q)];
    x(r) = sign(r) * s2.multipliers()(q);
  }
  res.status = LpStatus::optimal;
  res.x = x;
  res.value = c.dot(x);
  return res;
}

}  // namespace c11fit
