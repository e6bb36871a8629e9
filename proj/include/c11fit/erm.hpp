#pragma once

// Least squares over 1-fields with a bound on the C^{1,1} seminorm:
//
//   minimize (1/n) sum_a (y(a) - f(a))^2   subject to  Gamma^1(P) <= M,
//
// solved with the cutting-plane method on the flat k = (d+1) n layout.

#include <cmath>
#include <cstddef>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "c11fit/cutplane.hpp"
#include "c11fit/field.hpp"
#include "c11fit/gamma.hpp"

namespace c11fit {

/// The solver ended without any feasible iterate.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RegressionProblem {
  PointSet base;
  Vec y;
  double M = 1.0;
  double gamma_tol = 0.0;  // <= 0 selects 1e-6 |y|^2 / n
};

struct SolveOptions {
  std::size_t max_iters = 0;  // 0: the full iteration budget
  CenterOptions center;
  double stall_tol = -1.0;  // < 0 selects gamma_tol / 10; 0 disables
  TraceSink trace;
};

struct SolveReport {
  OneField field;
  double objective = 0.0;
  double gamma1_value = 0.0;
  std::size_t iterations = 0;
  bool used_trivial_shortcut = false;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double rho = 0.0;  // box radius used: min(rho2, data_radius)
  double L = 0.0;
  std::size_t T = 0;
  double gamma_tol = 0.0;
  bool stalled = false;
  bool collapsed = false;
  std::size_t max_constraints = 0;
};

/// Cut separating P from { Q : Gamma^1(Q) <= M }, or Inside.
///
/// With the oriented certificate (a, b, z), every feasible Q satisfies
/// Q_a(z) - Q_b(z) <= (M/2)(|a-z|^2 + |b-z|^2), which is linear in the flat layout.
inline OracleResponse feasibility_oracle(const OneField& P, double M) {
  const Gamma1Result g = gamma1(P);
  if (g.value <= M) return OracleResponse::Inside();
  const PairCertificate& c = *g.cert;
  const std::size_t d = P.dim();
  const auto dd = static_cast<Eigen::Index>(d);
  Vec w = Vec::Zero(static_cast<Eigen::Index>(P.flat_size()));
  const Vec za = c.z - P.point(c.a);
  const Vec zb = c.z - P.point(c.b);
  w(static_cast<Eigen::Index>(value_slot(c.a, d))) = 1.0;
  w.segment(static_cast<Eigen::Index>(gradient_slot(c.a, d)), dd) = za;
  w(static_cast<Eigen::Index>(value_slot(c.b, d))) = -1.0;
  w.segment(static_cast<Eigen::Index>(gradient_slot(c.b, d)), dd) = -zb;
  return OracleResponse::Cut(std::move(w), 0.5 * M * (za.squaredNorm() + zb.squaredNorm()));
}

struct ObjectiveValue {
  double value = 0.0;
  Vec gradient;  // flat layout; zero at gradient slots
};

inline ObjectiveValue objective_oracle(const OneField& P, const Vec& y) {
  if (y.size() != static_cast<Eigen::Index>(P.size())) throw std::invalid_argument("objective_oracle: y has wrong length");
  const std::size_t n = P.size();
  const std::size_t d = P.dim();
  const Vec r = P.values() - y;
  ObjectiveValue out;
  out.value = r.squaredNorm() / static_cast<double>(n);
  out.gradient = Vec::Zero(static_cast<Eigen::Index>(P.flat_size()));
  for (std::size_t i = 0; i < n; ++i)
    out.gradient(static_cast<Eigen::Index>(value_slot(i, d))) = 2.0 * r(static_cast<Eigen::Index>(i)) / static_cast<double>(n);
  return out;
}

/// An interpolating field that already satisfies the seminorm bound, if an obvious one
/// does: (y, 0) first, then y with the least-squares affine slope at every point. The
/// second candidate has Gamma^1 = 0 whenever y is affine, whatever the slope.
inline std::optional<OneField> trivial_shortcut(const PointSet& base, const Vec& y, double M) {
  OneField flat = OneField::with_values(base, y);
  if (gamma1(flat).value <= M) return flat;
  const auto n = static_cast<Eigen::Index>(base.size());
  const auto d = static_cast<Eigen::Index>(base.dim());
  Mat X(n, d + 1);
  X.col(0).setOnes();
  X.rightCols(d) = base.matrix().transpose();
  // Minimum-norm solution, so that n <= d and collinear points are handled too.
  const Vec slope = X.completeOrthogonalDecomposition().solve(y).tail(d);
  OneField tilted(base, y, slope.replicate(1, n));
  if (gamma1(tilted).value <= M) return tilted;
  return std::nullopt;
}

/// Radius of a Euclidean ball of fields around 0 inside { Gamma^1 <= M }.
inline double inner_radius(double r, double M, std::size_t n) {
  return r * r * M / (8.0 * (1.0 + r)) * std::sqrt(static_cast<double>(n));
}

/// Radius of a Euclidean ball containing the fields that beat the zero field.
inline double outer_radius(const Vec& y, double r, double M, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double ny = y.norm();
  const double t = 10.0 * ny / r + 2.5 * M;
  return std::sqrt(nn) * std::sqrt(ny * ny / nn + 4.0 * t * t);
}

/// Infinity-norm radius of a box holding every field P with Gamma^1(P) <= M whose
/// objective is no worse than that of the zero field.
///
/// Values: |f(a) - y(a)| <= |y|, so |f(a)| <= V := max|y| + |y|. Gradients: an extension F
/// with Lip(grad F) <= M gives |D_a f . (b - a)| <= 2V + (M/2)|b - a|^2 for every b, and d
/// well-spread neighbours b_1..b_d (chosen greedily) bound every coordinate of D_a f.
/// Returns +inf when the points of E do not span R^d.
inline double data_radius(const PointSet& base, const Vec& y, double M) {
  const std::size_t n = base.size();
  const std::size_t d = base.dim();
  const auto dd = static_cast<Eigen::Index>(d);
  const double V = y.cwiseAbs().maxCoeff() + y.norm();
  double rho = V;
  if (n < 2) return rho;
  for (std::size_t a = 0; a < n; ++a) {
    Mat B(dd, dd);
    Mat Q(dd, 0);
    Vec tau(dd);
    for (Eigen::Index c = 0; c < dd; ++c) {
      double best = 0.0;
      std::size_t pick = n;
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a) continue;
        const Vec v = base[b] - base[a];
        const double resid = (v - Q * (Q.transpose() * v)).norm();
        if (resid > best) {
          best = resid;
          pick = b;
        }
      }
      if (pick == n || best <= 1e-12 * (1.0 + base.matrix().cwiseAbs().maxCoeff()))
        return std::numeric_limits<double>::infinity();
      const Vec v = base[pick] - base[a];
      B.col(c) = v;
      tau(c) = 2.0 * V + 0.5 * M * v.squaredNorm();
      Vec q = v - Q * (Q.transpose() * v);
      Q.conservativeResize(Eigen::NoChange, c + 1);
      Q.col(c) = q.normalized();
    }
    // B^T D = t with |t_c| <= tau_c, so |D_j| <= sum_c |(B^{-1})_{c j}| tau_c.
    const Mat Binv = B.fullPivLu().inverse();
    for (Eigen::Index j = 0; j < dd; ++j) rho = std::max(rho, Binv.col(j).cwiseAbs().dot(tau));
  }
  return rho;
}

/// log2(4|y|^2 / (n gamma rho1)), floored at log2 k.
inline double choose_L(const Vec& y, std::size_t n, double gamma, double rho1, std::size_t k) {
  const double raw = std::log2(4.0 * y.squaredNorm() / (static_cast<double>(n) * gamma * rho1));
  const double floor = std::log2(static_cast<double>(k));
  return std::isfinite(raw) ? std::max(raw, floor) : floor;
}

/// n^{1/(2 max(d, 5))}.
inline double schedule_m(std::size_t n, std::size_t d) {
  if (n < 1 || d < 1) throw std::invalid_argument("schedule_m: n, d >= 1");
  return std::pow(static_cast<double>(n), 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(d, 5))));
}

inline double default_gamma_tol(const Vec& y) { return 1e-6 * y.squaredNorm() / static_cast<double>(y.size()); }

inline SolveReport solve(const RegressionProblem& prob, const SolveOptions& opt = {}) {
  const std::size_t n = prob.base.size();
  const std::size_t d = prob.base.dim();
  if (prob.y.size() != static_cast<Eigen::Index>(n)) throw std::invalid_argument("solve: y has wrong length");
  if (!prob.y.allFinite()) throw std::invalid_argument("solve: non-finite observation");
  if (!(prob.M > 0.0)) throw std::invalid_argument("solve: M must be positive");

  SolveReport rep;
  rep.gamma_tol = prob.gamma_tol > 0.0 ? prob.gamma_tol : default_gamma_tol(prob.y);
  if (auto f = trivial_shortcut(prob.base, prob.y, prob.M)) {
    rep.field = std::move(*f);
    rep.objective = 0.0;
    rep.gamma1_value = gamma1(rep.field).value;
    rep.used_trivial_shortcut = true;
    return rep;
  }

  const std::size_t k = (d + 1) * n;
  const double r = prob.base.separation();
  rep.rho1 = inner_radius(r, prob.M, n);
  rep.rho2 = outer_radius(prob.y, r, prob.M, n);
  rep.L = choose_L(prob.y, n, rep.gamma_tol, rep.rho1, k);

  rep.rho = std::min(rep.rho2, data_radius(prob.base, prob.y, prob.M));
  SolverConfig cfg;
  cfg.rho = rep.rho;
  cfg.L = rep.L;
  cfg.center = opt.center;
  rep.T = iteration_budget(k, cfg.L, cfg.rho, cfg);
  cfg.max_iters = opt.max_iters > 0 ? std::min(opt.max_iters, rep.T) : rep.T;
  cfg.stall_tol = opt.stall_tol < 0.0 ? rep.gamma_tol / 10.0 : opt.stall_tol;

  const PointSet& base = prob.base;
  const Vec& y = prob.y;
  const double M = prob.M;
  const SeparationOracle feas = [&](const Vec& v) { return feasibility_oracle(OneField::from_flat(base, v), M); };
  const Objective obj = [&](const Vec& v) { return objective_oracle(OneField::from_flat(base, v), y).value; };
  const Subgradient sub = [&](const Vec& v) { return objective_oracle(OneField::from_flat(base, v), y).gradient; };

  const Outcome out = run_minimize(k, feas, obj, sub, cfg, opt.trace);
  if (out.kind != OutcomeKind::minimizer) throw SolverFailure("no feasible 1-field found within budget");

  rep.field = OneField::from_flat(base, out.point);
  rep.objective = out.objective;
  rep.gamma1_value = gamma1(rep.field).value;
  rep.iterations = out.iterations;
  rep.stalled = out.stalled;
  rep.collapsed = out.collapsed;
  rep.max_constraints = out.max_constraints;
  return rep;
}

struct SeminormResult {
  double gamma = 0.0;
  OneField field;
  std::size_t iterations = 0;
};

struct SeminormOptions {
  std::size_t max_iters = 20000;
  double stall_tol = 1e-9;  // relative to the zero-gradient seminorm
  CenterOptions center;
  TraceSink trace;
};

/// Minimizes Gamma^1 over the gradients with the values held fixed.
///
/// The objective is convex in the gradients; a subgradient comes from one argmax
/// certificate. The search box is centred at the least-squares affine slope.
inline SeminormResult minimize_seminorm(const PointSet& base, const Vec& values, const SeminormOptions& opt = {}) {
  const std::size_t n = base.size();
  const std::size_t d = base.dim();
  if (n < 2) throw std::invalid_argument("minimize_seminorm: need n >= 2");
  if (values.size() != static_cast<Eigen::Index>(n)) throw std::invalid_argument("minimize_seminorm: values length != n");
  const auto dd = static_cast<Eigen::Index>(d);
  const auto nn = static_cast<Eigen::Index>(n);

  // Affine least-squares slope; the search runs over offsets from it.
  Mat X(nn, dd + 1);
  X.col(0).setOnes();
  X.rightCols(dd) = base.matrix().transpose();
  const Vec coef = X.completeOrthogonalDecomposition().solve(values);
  const Vec slope = coef.tail(dd);

  auto field_at = [&](const Vec& v) {
    Mat g = Eigen::Map<const Mat>(v.data(), dd, nn);
    g.colwise() += slope;
    return OneField(base, values, std::move(g));
  };

  const OneField start = field_at(Vec::Zero(dd * nn));
  const Gamma1Result g0 = gamma1(start);
  SeminormResult res;
  if (g0.value <= 0.0) {
    res.field = start;
    return res;
  }

  // Any minimizer has every gradient within G0 * diam of the secant slopes, so a box of
  // twice that size (around the affine slope) contains it.
  double diam = 0.0;
  double max_slope = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = (base[i] - base[j]).norm();
      diam = std::max(diam, dist);
      max_slope = std::max(max_slope, std::abs(values(static_cast<Eigen::Index>(i)) - values(static_cast<Eigen::Index>(j))) / dist);
    }
  SolverConfig cfg;
  cfg.rho = 2.0 * (max_slope + slope.norm() + g0.value * diam) + 1e-12;
  cfg.max_iters = opt.max_iters;
  cfg.center = opt.center;
  cfg.stall_tol = opt.stall_tol * g0.value;

  const std::size_t k = d * n;
  const SeparationOracle inside = [](const Vec&) { return OracleResponse::Inside(); };
  const Objective obj = [&](const Vec& v) { return gamma1(field_at(v)).value; };
  const Subgradient sub = [&](const Vec& v) {
    const OneField P = field_at(v);
    const Gamma1Result g = gamma1(P);
    Vec w = Vec::Zero(static_cast<Eigen::Index>(k));
    if (!g.cert || g.value <= 0.0) return w;
    const PairCertificate& c = *g.cert;
    const Vec za = c.z - P.point(c.a);
    const Vec zb = c.z - P.point(c.b);
    const double den = za.squaredNorm() + zb.squaredNorm();
    w.segment(static_cast<Eigen::Index>(c.a * d), dd) += 2.0 * za / den;
    w.segment(static_cast<Eigen::Index>(c.b * d), dd) -= 2.0 * zb / den;
    return w;
  };

  const Outcome out = run_minimize(k, inside, obj, sub, cfg, opt.trace);
  if (out.kind != OutcomeKind::minimizer) throw SolverFailure("minimize_seminorm: no iterate recorded");
  res.field = field_at(out.point);
  res.gamma = out.objective;
  res.iterations = out.iterations;
  if (g0.value < res.gamma) {
    res.field = start;
    res.gamma = g0.value;
  }
  return res;
}

}  // namespace c11fit
