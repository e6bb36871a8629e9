#pragma once

// Wells' C^{1,1} interpolant of a 1-field with gradient Lipschitz constant M.
//
// With shifted points a~ = a - D_a/M and d_a(x) = c_a + (M/4)|x - a~|^2, where
// c_a = f(a) - |D_a|^2/(2M), each subset S of affinely independent shifted points spans
// S_H (their affine hull) and S_E = { x : d_a(x) = d_b(x) for a, b in S }, which meet
// orthogonally in one point S_C. S_* is the part of S_E where S attains min_a d_a. The
// cells T_S = (hull(S~) + S_*)/2 of the subsets with nonempty S_* tile R^d, and on T_S
//
//   f^(x) = d_S(S_C) + (M/2) dist(x, S_H)^2 - (M/2) dist(x, S_E)^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "c11fit/cutplane.hpp"
#include "c11fit/field.hpp"
#include "c11fit/lp.hpp"

namespace c11fit {

struct WellsCheck {
  bool ok = true;
  std::size_t a = 0;
  std::size_t b = 0;
  double slack = std::numeric_limits<double>::infinity();
};

/// Minimal slack of
///   f(b) <= f(a) + (D_a + D_b).(b - a)/2 + (M/4)|b - a|^2 - |D_a - D_b|^2/(4M)
/// over ordered pairs, and the pair attaining it. `ok` means slack >= -1e-9.
inline WellsCheck check_wells_condition(const OneField& P, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("check_wells_condition: M must be positive");
  WellsCheck out;
  for (std::size_t a = 0; a < P.size(); ++a)
    for (std::size_t b = 0; b < P.size(); ++b) {
      if (a == b) continue;
      const Vec ab = P.point(b) - P.point(a);
      const double rhs = P.value(a) + 0.5 * (P.gradient(a) + P.gradient(b)).dot(ab) + 0.25 * M * ab.squaredNorm() -
                         (P.gradient(a) - P.gradient(b)).squaredNorm() / (4.0 * M);
      const double slack = rhs - P.value(b);
      if (slack < out.slack) {
        out.slack = slack;
        out.a = a;
        out.b = b;
      }
    }
  out.ok = out.slack >= -1e-9;
  return out;
}

struct ShiftedConfig {
  OneField field;
  double M = 1.0;
  Mat shifted;  // d x n
  Vec offsets;  // c_a
  bool perturbed = false;

  double d(std::size_t a, const Vec& x) const {
    return offsets(static_cast<Eigen::Index>(a)) + 0.25 * M * (x - shifted.col(static_cast<Eigen::Index>(a))).squaredNorm();
  }
};

struct WellsCell {
  std::vector<std::size_t> S;
  Mat U;   // orthonormal directions of S_H
  Mat V;   // orthonormal directions of S_E
  Vec SC;  // S_H meets S_E here
  std::vector<Halfspace> sstar;  // S_*: equalities within S as inequality pairs, then d_S <= d_c
  std::size_t num_equalities = 0;  // leading entries of sstar that come from the pairs
  Mat hull;  // shifted points of S as columns
  double d_at_SC = 0.0;
  // Derived from hull: barycentric weights of vertices 1.. of a point y of S_H are
  // bary (y - hull.col(0)); edge_scale is the longest edge from vertex 0.
  Mat bary;
  double edge_scale = 0.0;
};

struct CellComplex {
  std::vector<WellsCell> cells;
  ShiftedConfig config;
};

struct EvalResult {
  double value = 0.0;
  Vec gradient;
  std::size_t cell = 0;  // index into CellComplex::cells
  Vec y;                 // in hull(S~)
  Vec z;                 // in S_*
};

struct WellsConditionViolated : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct LocationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline ShiftedConfig shifted_config(const OneField& P, double M) {
  ShiftedConfig cfg{P, M, Mat(P.dim(), P.size()), Vec(P.size()), false};
  cfg.shifted = P.base().matrix() - P.gradients() / M;
  cfg.offsets = P.values() - P.gradients().colwise().squaredNorm().transpose() / (2.0 * M);
  return cfg;
}

/// Moves every shifted point by 1e-9 in a direction drawn from a generator seeded by its index.
inline void perturb(ShiftedConfig& cfg) {
  for (Eigen::Index i = 0; i < cfg.shifted.cols(); ++i) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(i) + 1);
    std::normal_distribution<double> N(0.0, 1.0);
    Vec u(cfg.shifted.rows());
    for (auto& e : u) e = N(rng);
    cfg.shifted.col(i) += 1e-9 * u / u.norm();
  }
  cfg.perturbed = true;
}

inline double point_scale(const ShiftedConfig& cfg) { return 1.0 + cfg.shifted.cwiseAbs().maxCoeff(); }

inline bool has_duplicate_shifted_points(const ShiftedConfig& cfg) {
  const double tol = 1e-12 * point_scale(cfg);
  for (Eigen::Index i = 0; i < cfg.shifted.cols(); ++i)
    for (Eigen::Index j = i + 1; j < cfg.shifted.cols(); ++j)
      if ((cfg.shifted.col(i) - cfg.shifted.col(j)).norm() <= tol) return true;
  return false;
}

/// d_{a}(x) <= d_{c}(x) as normal.x <= offset.
inline Halfspace closer_than(const ShiftedConfig& cfg, std::size_t a, std::size_t c) {
  const auto ai = static_cast<Eigen::Index>(a);
  const auto ci = static_cast<Eigen::Index>(c);
  const Vec ta = cfg.shifted.col(ai);
  const Vec tc = cfg.shifted.col(ci);
  return {0.5 * cfg.M * (tc - ta),
          cfg.offsets(ci) - cfg.offsets(ai) + 0.25 * cfg.M * (tc.squaredNorm() - ta.squaredNorm())};
}

inline void prepare_barycentric(WellsCell& cell) {
  const Eigen::Index r = cell.hull.cols() - 1;
  if (r == 0) {
    cell.bary.resize(0, cell.hull.rows());
    cell.edge_scale = 0.0;
    return;
  }
  const Mat E = cell.hull.rightCols(r).colwise() - cell.hull.col(0);
  cell.bary = E.completeOrthogonalDecomposition().pseudoInverse();
  cell.edge_scale = E.colwise().norm().maxCoeff();
}

// weak: S_* is nonempty but has no point where S wins by the margin threshold. This
// happens when the Wells condition is tight, e.g. d+2 distance functions tie at one
// point. Weak cells are kept: they either have no interior or share the value formula of
// their overlapping neighbours (same S_C and d_S(S_C) for a tie).
enum class Candidate { member, weak, empty, degenerate };

/// Builds the cell of S, and reports whether S_* has a point where S wins by a margin.
/// Margins are geometric distances within S_E; `weak_tol` bounds how far below zero a
/// margin may fall for S_* to count as nonempty.
inline Candidate make_cell(const ShiftedConfig& cfg, const std::vector<std::size_t>& S, WellsCell& cell,
                           double weak_tol) {
  const auto d = static_cast<Eigen::Index>(cfg.shifted.rows());
  const auto r = static_cast<Eigen::Index>(S.size()) - 1;
  const auto a0 = static_cast<Eigen::Index>(S[0]);
  const Vec t0 = cfg.shifted.col(a0);
  cell.S = S;
  cell.hull.resize(d, r + 1);
  for (Eigen::Index i = 0; i <= r; ++i) cell.hull.col(i) = cfg.shifted.col(static_cast<Eigen::Index>(S[static_cast<std::size_t>(i)]));

  // S_H directions and S_E normals coincide: the rows of G are a~_i - a~_0.
  Mat Gt(d, r);
  Vec beta(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Halfspace h = closer_than(cfg, S[static_cast<std::size_t>(i) + 1], S[0]);
    // d_{a_i} <= d_{a_0} reads (M/2)(a~_0 - a~_i).x <= ...; flip to G x = beta.
    Gt.col(i) = cfg.shifted.col(static_cast<Eigen::Index>(S[static_cast<std::size_t>(i) + 1])) - t0;
    beta(i) = -h.offset / (0.5 * cfg.M);
  }
  Eigen::HouseholderQR<Mat> qr(Gt);
  const Mat Q = qr.householderQ();
  if (r > 0) {
    Eigen::ColPivHouseholderQR<Mat> rank_check(Gt);
    rank_check.setThreshold(1e-10);
    if (rank_check.rank() < r) return Candidate::degenerate;
  }
  cell.U = Q.leftCols(r);
  cell.V = Q.rightCols(d - r);
  // S_C = a~_0 + U alpha with G S_C = beta, and G U = R^T.
  const Mat R = qr.matrixQR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
  const Vec alpha = R.transpose().triangularView<Eigen::Lower>().solve(beta - Gt.transpose() * t0);
  cell.SC = t0 + cell.U * alpha;
  cell.d_at_SC = cfg.d(S[0], cell.SC);
  prepare_barycentric(cell);

  cell.sstar.clear();
  for (std::size_t i = 1; i < S.size(); ++i) {
    const Halfspace h = closer_than(cfg, S[0], S[i]);
    cell.sstar.push_back(h);
    cell.sstar.push_back({-h.normal, -h.offset});
  }
  cell.num_equalities = cell.sstar.size();
  std::vector<char> in_s(static_cast<std::size_t>(cfg.shifted.cols()), 0);
  for (std::size_t a : S) in_s[a] = 1;
  for (std::size_t c = 0; c < in_s.size(); ++c)
    if (!in_s[c]) cell.sstar.push_back(closer_than(cfg, S[0], c));

  // Margin program over x = S_C + V t: maximize the distance delta (within S_E) by which
  // x clears every d_S <= d_c boundary. Rows are normalized so delta is geometric.
  const Eigen::Index p = d - r;
  std::vector<std::pair<Vec, double>> rows;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t q = cell.num_equalities; q < cell.sstar.size(); ++q) {
    const Halfspace& h = cell.sstar[q];
    const Vec a = cell.V.transpose() * h.normal;
    const double b = h.offset - h.normal.dot(cell.SC);
    const double na = a.norm();
    if (na <= 1e-14 * h.normal.norm()) {
      // Constant on S_E: either always satisfied or never.
      margin = std::min(margin, b / h.normal.norm());
      continue;
    }
    rows.emplace_back(a / na, b / na);
  }
  if (margin < -weak_tol) return Candidate::empty;
  if (!rows.empty() && p == 0) {
    for (const auto& row : rows) margin = std::min(margin, row.second);
  } else if (!rows.empty()) {
    Mat A(static_cast<Eigen::Index>(rows.size()) + 1, p + 1);
    Vec b(A.rows());
    for (std::size_t q = 0; q < rows.size(); ++q) {
      const auto i = static_cast<Eigen::Index>(q);
      A.row(i).head(p) = rows[q].first.transpose();
      A(i, p) = 1.0;
      b(i) = rows[q].second;
    }
    A.row(A.rows() - 1).setZero();
    A(A.rows() - 1, p) = 1.0;
    b(b.size() - 1) = 1.0;
    Vec c = Vec::Zero(p + 1);
    c(p) = 1.0;
    const LpResult lp = solve_lp(c, A, b);
    margin = std::min(margin, lp.status == LpStatus::optimal ? lp.value : -std::numeric_limits<double>::infinity());
  }
  if (margin > 1e-10) return Candidate::member;
  return margin >= -weak_tol ? Candidate::weak : Candidate::empty;
}

inline std::vector<WellsCell> enumerate_cells(const ShiftedConfig& cfg, bool& degenerate) {
  const std::size_t n = static_cast<std::size_t>(cfg.shifted.cols());
  const std::size_t d = static_cast<std::size_t>(cfg.shifted.rows());
  std::vector<WellsCell> cells;
  degenerate = false;

  // Level by level. A point of S_* also lies in F_* for every face F of S, so candidates
  // of size r + 1 are built from subsets of size r whose S_* is nonempty (members and
  // weak subsets alike).
  const double weak_tol = 1e-9 * point_scale(cfg);
  std::set<std::vector<std::size_t>> level;
  for (std::size_t a = 0; a < n; ++a) {
    WellsCell cell;
    const Candidate kind = make_cell(cfg, {a}, cell, weak_tol);
    if (kind == Candidate::member || kind == Candidate::weak) {
      level.insert({a});
      cells.push_back(std::move(cell));
    }
  }
  for (std::size_t size = 2; size <= std::min(d + 1, n) && !level.empty(); ++size) {
    std::set<std::vector<std::size_t>> next;
    std::set<std::vector<std::size_t>> tried;
    for (const auto& base : level)
      for (std::size_t c = base.back() + 1; c < n; ++c) {
        std::vector<std::size_t> S = base;
        S.push_back(c);
        if (!tried.insert(S).second) continue;
        bool faces_ok = true;
        for (std::size_t drop = 0; drop + 1 < S.size() && faces_ok; ++drop) {
          std::vector<std::size_t> face;
          for (std::size_t i = 0; i < S.size(); ++i)
            if (i != drop) face.push_back(S[i]);
          faces_ok = level.count(face) > 0;
        }
        if (!faces_ok) continue;
        WellsCell cell;
        const Candidate kind = make_cell(cfg, S, cell, weak_tol);
        if (kind == Candidate::degenerate) {
          degenerate = true;
          continue;
        }
        if (kind == Candidate::member || kind == Candidate::weak) {
          next.insert(S);
          cells.push_back(std::move(cell));
        }
      }
    level = std::move(next);
  }
  return cells;
}

/// Location residual of x in one cell (0 when x is in T_S) and the decomposition.
inline double cell_residual(const WellsCell& cell, const Vec& x, Vec& y, Vec& z, double cutoff) {
  const Vec w = x - cell.SC;
  const Vec pu = cell.U * (cell.U.transpose() * w);
  y = cell.SC + 2.0 * pu;
  z = cell.SC + 2.0 * (w - pu);
  double res = 0.0;
  if (cell.S.size() > 1) {
    const Vec lam = cell.bary * (y - cell.hull.col(0));
    res = std::max(res, -std::min(1.0 - lam.sum(), lam.minCoeff()) * cell.edge_scale);
    if (res > cutoff) return res;
  }
  for (std::size_t q = cell.num_equalities; q < cell.sstar.size(); ++q) {
    const Halfspace& h = cell.sstar[q];
    const double nn = h.normal.norm();
    if (nn == 0.0) continue;
    res = std::max(res, (h.normal.dot(z) - h.offset) / nn);
    if (res > cutoff) return res;
  }
  return res;
}

}  // namespace detail

/// Collection of Wells cells for the 1-field P and constant M.
///
/// Throws WellsConditionViolated when the pairwise condition fails by more than 1e-9.
inline CellComplex build_complex(const OneField& P, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("build_complex: M must be positive");
  if (P.size() < 1) throw std::invalid_argument("build_complex: empty field");
  const WellsCheck check = check_wells_condition(P, M);
  if (!check.ok) throw WellsConditionViolated("build_complex: Wells condition violated");

  CellComplex cx;
  cx.config = detail::shifted_config(P, M);
  if (detail::has_duplicate_shifted_points(cx.config)) detail::perturb(cx.config);
  bool degenerate = false;
  cx.cells = detail::enumerate_cells(cx.config, degenerate);
  if (degenerate && !cx.config.perturbed) {
    detail::perturb(cx.config);
    cx.cells = detail::enumerate_cells(cx.config, degenerate);
  }
  return cx;
}

/// Cell containing x with the decomposition x = (y + z)/2. Cells are tried in order and
/// the first exact hit wins; otherwise the best cell within 1e-7 (relative) is used.
inline std::size_t locate(const CellComplex& cx, const Vec& x, Vec& y, Vec& z) {
  if (x.size() != static_cast<Eigen::Index>(cx.config.field.dim())) throw std::invalid_argument("locate: wrong dimension");
  const double tol = 1e-7 * (1.0 + x.cwiseAbs().maxCoeff() + detail::point_scale(cx.config));
  const double exact = 1e-12 * (1.0 + x.cwiseAbs().maxCoeff() + detail::point_scale(cx.config));
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_cell = cx.cells.size();
  Vec yc, zc;
  for (std::size_t i = 0; i < cx.cells.size(); ++i) {
    const double res = detail::cell_residual(cx.cells[i], x, yc, zc, std::min(best, tol));
    if (res < best) {
      best = res;
      best_cell = i;
      y = yc;
      z = zc;
      if (res <= exact) break;
    }
  }
  if (best_cell == cx.cells.size() || best > tol) throw LocationFailure("locate: no cell contains the point");
  return best_cell;
}

/// The quadratic piece of cell `i` at x, whether or not x lies in T_S.
inline EvalResult eval_in_cell(const CellComplex& cx, std::size_t i, const Vec& x) {
  const WellsCell& cell = cx.cells.at(i);
  EvalResult out;
  out.cell = i;
  const Vec w = x - cell.SC;
  const Vec pu = cell.U * (cell.U.transpose() * w);
  const Vec pv = w - pu;
  const double M = cx.config.M;
  out.value = cell.d_at_SC + 0.5 * M * pv.squaredNorm() - 0.5 * M * pu.squaredNorm();
  out.gradient = M * (pv - pu);
  out.y = cell.SC + 2.0 * pu;
  out.z = cell.SC + 2.0 * pv;
  return out;
}

inline EvalResult eval(const CellComplex& cx, const Vec& x) {
  Vec y, z;
  return eval_in_cell(cx, locate(cx, x, y, z), x);
}

/// Axis-aligned box around the data points, inflated by `pad`.
inline std::pair<Vec, Vec> bounding_box(const PointSet& E, double pad) {
  return {E.matrix().rowwise().minCoeff().array() - pad, E.matrix().rowwise().maxCoeff().array() + pad};
}

/// max |grad f^(x) - grad f^(x')| / |x - x'| over random pairs in the data box inflated by
/// 1. Pairs come from one stream, so a larger num_pairs extends the same sample.
inline double lip_gradient_estimate(const CellComplex& cx, std::size_t num_pairs, std::uint64_t seed) {
  const auto [lo, hi] = bounding_box(cx.config.field.base(), 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto draw = [&] {
    Vec x(lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * U(rng);
    return x;
  };
  double best = 0.0;
  for (std::size_t p = 0; p < num_pairs; ++p) {
    const Vec x = draw();
    const Vec xp = draw();
    const double dist = (x - xp).norm();
    if (dist == 0.0) continue;
    best = std::max(best, (eval(cx, x).gradient - eval(cx, xp).gradient).norm() / dist);
  }
  return best;
}

}  // namespace c11fit
