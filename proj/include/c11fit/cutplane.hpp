#pragma once

// Volumetric-center cutting-plane method (Vaidya's algorithm, Anstreicher's variant)
// for convex feasibility and convex minimization over a box
//
//   S_0 = { v in R^k : |v|_inf <= rho },
//
// driven by a separation oracle. Each iteration recenters at the minimizer of the
// volumetric barrier V(x) = 1/2 log det(sum_i w_i w_i^T / s_i(x)^2), then either drops
// the constraint of smallest leverage (when it is below tau) or queries the oracle and
// adds the returned cut.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace c11fit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// { v : normal . v <= offset }
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Intersection of halfspaces with a strictly interior point.
///
/// Normals are kept dense together with their nonzero pattern; the barrier code
/// uses the pattern so that sparse cuts cost O(nnz^2) to assemble.
class Polytope {
 public:
  Polytope() = default;

  /// No halfspaces yet (all of R^k); interior point 0.
  explicit Polytope(std::size_t k) : A_(0, static_cast<Eigen::Index>(k)), b_(0), x_(Vec::Zero(static_cast<Eigen::Index>(k))) {}

  /// The infinity-norm box of radius rho (2k halfspaces) centred at the origin.
  static Polytope box(std::size_t k, double rho) {
    if (k < 1) throw std::invalid_argument("Polytope::box: k >= 1");
    if (!(rho > 0.0)) throw std::invalid_argument("Polytope::box: rho > 0");
    Polytope p(k);
    const auto kk = static_cast<Eigen::Index>(k);
    p.A_.setZero(4 * kk, kk);
    p.b_.resize(4 * kk);
    for (Eigen::Index j = 0; j < kk; ++j) {
      p.A_(2 * j, j) = 1.0;
      p.A_(2 * j + 1, j) = -1.0;
      p.b_(2 * j) = rho;
      p.b_(2 * j + 1) = rho;
      p.nz_.push_back({j});
      p.nz_.push_back({j});
    }
    p.m_ = 2 * kk;
    return p;
  }

  std::size_t dim() const { return static_cast<std::size_t>(A_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(m_); }

  auto normals() const { return A_.topRows(m_); }
  auto offsets() const { return b_.head(m_); }
  Halfspace halfspace(std::size_t i) const {
    return {A_.row(static_cast<Eigen::Index>(i)).transpose(), b_(static_cast<Eigen::Index>(i))};
  }
  /// Column indices of the nonzeros of normal i.
  const std::vector<Eigen::Index>& pattern(std::size_t i) const { return nz_[i]; }

  const Vec& interior_point() const { return x_; }

  Vec slacks(const Vec& x) const { return offsets() - normals() * x; }

  void set_interior_point(Vec x) {
    if (x.size() != A_.cols()) throw std::invalid_argument("Polytope: interior point has wrong size");
    if (m_ > 0 && !(slacks(x).minCoeff() > 0.0)) throw std::invalid_argument("Polytope: point is not strictly interior");
    x_ = std::move(x);
  }

  void add(const Halfspace& h) {
    if (h.normal.size() != A_.cols()) throw std::invalid_argument("Polytope::add: normal has wrong size");
    if (!(h.normal.norm() > 0.0)) throw std::invalid_argument("Polytope::add: zero normal");
    if (m_ == A_.rows()) {
      const Eigen::Index cap = std::max<Eigen::Index>(8, 2 * A_.rows());
      A_.conservativeResize(cap, Eigen::NoChange);
      b_.conservativeResize(cap);
    }
    A_.row(m_) = h.normal.transpose();
    b_(m_) = h.offset;
    std::vector<Eigen::Index> nz;
    for (Eigen::Index j = 0; j < h.normal.size(); ++j)
      if (h.normal(j) != 0.0) nz.push_back(j);
    nz_.push_back(std::move(nz));
    ++m_;
  }

  /// Removes halfspace i; the last halfspace takes its index.
  void remove(std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (ii >= m_) throw std::out_of_range("Polytope::remove");
    if (ii != m_ - 1) {
      A_.row(ii) = A_.row(m_ - 1);
      b_(ii) = b_(m_ - 1);
      nz_[i] = std::move(nz_.back());
    }
    nz_.pop_back();
    --m_;
  }

 private:
  Mat A_;
  Vec b_;
  Eigen::Index m_ = 0;
  std::vector<std::vector<Eigen::Index>> nz_;
  Vec x_;
};

enum class NewtonMetric {
  automatic,  // exact while m^2 k is small, the barrier Hessian H otherwise
  exact,      // A_s^T (3 Sigma - 2 P.*P) A_s
  q,          // Q = A_s^T Sigma A_s, within a factor 3 of the exact Hessian
  barrier,    // H = A_s^T A_s; reuses the factorization of the barrier point
};

struct CenterOptions {
  double tol = 1e-8;  // Newton decrement
  int max_steps = 50;
  NewtonMetric metric = NewtonMetric::automatic;
};

/// Volumetric center and the quantities the cutting-plane loop needs there.
struct CenterInfo {
  Vec x;
  Vec leverage;                 // sigma_i = (w_i/s_i)^T H^{-1} (w_i/s_i)
  // H(x) = sum w_i w_i^T / s_i^2 is factored as D^{-1} (L L^T) D^{-1} with the diagonal
  // scaling D = diag(H)^{-1/2}, which keeps the Cholesky factor well conditioned.
  Vec scale;
  Eigen::LLT<Mat> scaled_llt;
  double barrier = 0.0;         // V(x)
  double decrement = 0.0;       // NaN when max_steps ended the iteration
  int steps = 0;
};

namespace detail {

/// Halfspaces split by sparsity. Rows with many nonzeros (objective cuts) are handled
/// as one dense block over the union of their columns.
struct RowGroups {
  std::vector<Eigen::Index> sparse;
  std::vector<Eigen::Index> dense;
  std::vector<Eigen::Index> cols;  // sorted union of the dense patterns

  explicit RowGroups(const Polytope& P) {
    const auto k = static_cast<Eigen::Index>(P.dim());
    std::vector<char> used(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < P.size(); ++i) {
      const auto& nz = P.pattern(i);
      if (nz.size() < 16) {
        sparse.push_back(static_cast<Eigen::Index>(i));
        continue;
      }
      dense.push_back(static_cast<Eigen::Index>(i));
      for (const Eigen::Index j : nz) used[static_cast<std::size_t>(j)] = 1;
    }
    for (Eigen::Index j = 0; j < k; ++j)
      if (used[static_cast<std::size_t>(j)]) cols.push_back(j);
  }

  /// Dense rows restricted to `cols`, one row per halfspace, each scaled by `coef`.
  Mat dense_block(const Polytope& P, const Vec& coef) const {
    const auto rows = P.normals();
    Mat W(static_cast<Eigen::Index>(dense.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (std::size_t r = 0; r < dense.size(); ++r)
        W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = coef(dense[r]) * rows(dense[r], cols[c]);
    return W;
  }
};

/// sum_i c_i w_i w_i^T for c_i >= 0 (lower triangle only).
inline void accumulate_outer(const Polytope& P, const RowGroups& g, const Vec& coef, Mat& out) {
  const auto rows = P.normals();
  for (const Eigen::Index i : g.sparse) {
    const auto& nz = P.pattern(static_cast<std::size_t>(i));
    const double c = coef(i);
    for (std::size_t p = 0; p < nz.size(); ++p) {
      const double wp = c * rows(i, nz[p]);
      for (std::size_t q = 0; q <= p; ++q) out(std::max(nz[p], nz[q]), std::min(nz[p], nz[q])) += wp * rows(i, nz[q]);
    }
  }
  if (g.dense.empty()) return;
  const Mat W = g.dense_block(P, coef.cwiseSqrt());
  const auto u = static_cast<Eigen::Index>(g.cols.size());
  Mat G = Mat::Zero(u, u);
  G.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose());
  for (Eigen::Index q = 0; q < u; ++q)
    for (Eigen::Index p = q; p < u; ++p) out(g.cols[static_cast<std::size_t>(p)], g.cols[static_cast<std::size_t>(q)]) += G(p, q);
}

/// Inverse of the lower triangle of `L` by 2x2 block recursion, so the bulk of the work
/// is in matrix products. Reads only the lower triangle.
inline void lower_inverse(const Eigen::Ref<const Mat>& L, Eigen::Ref<Mat> X) {
  const Eigen::Index n = L.rows();
  if (n <= 48) {
    X.setIdentity();
    L.triangularView<Eigen::Lower>().solveInPlace(X);
    return;
  }
  const Eigen::Index h = n / 2;
  lower_inverse(L.topLeftCorner(h, h), X.topLeftCorner(h, h));
  lower_inverse(L.bottomRightCorner(n - h, n - h), X.bottomRightCorner(n - h, n - h));
  X.topRightCorner(h, n - h).setZero();
  const Mat t = L.bottomLeftCorner(n - h, h) * X.topLeftCorner(h, h).triangularView<Eigen::Lower>();
  X.bottomLeftCorner(n - h, h).noalias() = -(X.bottomRightCorner(n - h, n - h).triangularView<Eigen::Lower>() * t);
}

struct BarrierPoint {
  Vec s;
  Vec scale;
  Eigen::LLT<Mat> llt;
  double V = 0.0;
};

inline bool barrier_at(const Polytope& P, const RowGroups& g, const Vec& x, BarrierPoint& bp) {
  bp.s = P.slacks(x);
  if (!(bp.s.minCoeff() > 0.0)) return false;
  const auto k = static_cast<Eigen::Index>(P.dim());
  Mat H = Mat::Zero(k, k);
  accumulate_outer(P, g, bp.s.array().square().inverse().matrix(), H);
  bp.scale = H.diagonal().cwiseSqrt().cwiseInverse();
  if (!bp.scale.allFinite()) return false;
  H = bp.scale.asDiagonal() * H * bp.scale.asDiagonal();
  bp.llt.compute(H);  // reads the lower triangle
  if (bp.llt.info() != Eigen::Success) return false;
  bp.V = bp.llt.matrixLLT().diagonal().array().log().sum() - bp.scale.array().log().sum();
  return std::isfinite(bp.V);
}

}  // namespace detail

/// Damped Newton on the volumetric barrier, warm-started at `x0`.
///
/// The Newton metric is the exact barrier Hessian A_s^T (3 Sigma - 2 P.*P) A_s, with
/// P = A_s H^{-1} A_s^T and Sigma its diagonal, or one of the cheaper Q = A_s^T Sigma A_s
/// and H = A_s^T A_s. Throws NumericalFailure when the interior is lost or a metric is not
/// positive definite.
inline CenterInfo volumetric_center(const Polytope& P, const Vec& x0, const CenterOptions& opt = {}) {
  if (P.size() < P.dim()) throw NumericalFailure("volumetric_center: fewer constraints than dimensions");
  const auto k = static_cast<Eigen::Index>(P.dim());
  const auto m = static_cast<Eigen::Index>(P.size());
  const auto rows = P.normals();
  NewtonMetric metric_kind = opt.metric;
  if (metric_kind == NewtonMetric::automatic)
    metric_kind = static_cast<double>(m) * m * k <= 2e7 ? NewtonMetric::exact : NewtonMetric::barrier;
  const bool exact = metric_kind == NewtonMetric::exact;

  const detail::RowGroups groups(P);
  CenterInfo info;
  Vec x = x0;
  detail::BarrierPoint bp;
  if (!detail::barrier_at(P, groups, x, bp)) throw NumericalFailure("volumetric_center: start point not interior");

  auto finish = [&](const Vec& sigma, double lambda, int step) {
    info.x = x;
    info.leverage = sigma;
    info.scale = bp.scale;
    info.scaled_llt = bp.llt;
    info.barrier = bp.V;
    info.decrement = lambda;
    info.steps = step;
    return info;
  };

  Mat Linv(k, k);
  Mat Y(k, m);  // columns L^{-1} D w_i / s_i
  for (int step = 0;; ++step) {
    detail::lower_inverse(bp.llt.matrixLLT(), Linv);
    Vec sigma(m);
    Vec grad = Vec::Zero(k);
    for (const Eigen::Index i : groups.sparse) {
      const auto& nz = P.pattern(static_cast<std::size_t>(i));
      auto yi = Y.col(i);
      yi.setZero();
      for (const Eigen::Index j : nz) yi.tail(k - j) += rows(i, j) * bp.scale(j) * Linv.col(j).tail(k - j);
      yi /= bp.s(i);
    }
    if (!groups.dense.empty()) {
      const auto u = static_cast<Eigen::Index>(groups.cols.size());
      Mat Lu(k, u);
      for (Eigen::Index c = 0; c < u; ++c) {
        const Eigen::Index j = groups.cols[static_cast<std::size_t>(c)];
        Lu.col(c) = bp.scale(j) * Linv.col(j);
      }
      const Mat Yd = Lu * groups.dense_block(P, bp.s.cwiseInverse()).transpose();
      for (std::size_t r = 0; r < groups.dense.size(); ++r) Y.col(groups.dense[r]) = Yd.col(static_cast<Eigen::Index>(r));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      sigma(i) = Y.col(i).squaredNorm();
      for (const Eigen::Index j : P.pattern(static_cast<std::size_t>(i))) grad(j) += sigma(i) * rows(i, j) / bp.s(i);
    }
    if (step >= opt.max_steps) return finish(sigma, std::numeric_limits<double>::quiet_NaN(), step);

    Vec dir;
    if (metric_kind == NewtonMetric::barrier) {
      dir = -bp.scale.cwiseProduct(bp.llt.solve(bp.scale.cwiseProduct(grad)));
    } else {
      Mat metric;
      if (exact) {
        const Mat As = bp.s.cwiseInverse().asDiagonal() * rows;
        Mat proj = Y.transpose() * Y;
        proj = -2.0 * proj.cwiseAbs2();
        proj.diagonal() += 3.0 * sigma;
        metric = As.transpose() * (proj * As);
      } else {
        metric = Mat::Zero(k, k);
        detail::accumulate_outer(P, groups, sigma.cwiseQuotient(bp.s.cwiseAbs2()), metric);
      }
      metric = bp.scale.asDiagonal() * metric * bp.scale.asDiagonal();
      Eigen::LLT<Mat> mllt(metric);
      if (mllt.info() != Eigen::Success) throw NumericalFailure("volumetric_center: Newton metric not positive definite");
      dir = -bp.scale.cwiseProduct(mllt.solve(bp.scale.cwiseProduct(grad)));
    }
    const double lambda = std::sqrt(std::max(0.0, -grad.dot(dir)));
    if (!std::isfinite(lambda)) throw NumericalFailure("volumetric_center: non-finite Newton decrement");
    if (lambda <= opt.tol) return finish(sigma, lambda, step);

    // Full steps inside the quadratic region, Armijo backtracking outside it.
    const bool local = exact && lambda < 0.25;
    double t = local || !exact ? 1.0 : 1.0 / (1.0 + lambda);
    detail::BarrierPoint trial;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Vec xt = x + t * dir;
      if (!detail::barrier_at(P, groups, xt, trial)) continue;
      if (local || trial.V <= bp.V - 1e-4 * t * lambda * lambda) {
        x = xt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Stalled line search: the decrement is below what rounding lets us resolve.
      if (lambda < 1e-5) return finish(sigma, lambda, step);
      throw NumericalFailure("volumetric_center: line search failed");
    }
    bp = std::move(trial);
  }
}

struct SolverConfig {
  double eps = 0.005;
  double tau = 0.007;
  double delta_v = 0.00037;
  double L = 10.0;
  double rho = 1.0;
  std::size_t max_iters = 1;
  CenterOptions center;
  /// Minimization stops once the best objective has not improved by more than
  /// `stall_tol` over `stall_window_factor * k` consecutive feasible iterates (0 disables).
  double stall_tol = 0.0;
  std::size_t stall_window_factor = 5;
  /// Deep cuts are clipped to this many Dikin radii so the next iterate stays interior.
  double max_cut_depth = 0.8;
};

struct OracleResponse {
  bool inside = true;
  Halfspace cut;

  static OracleResponse Inside() { return {}; }
  static OracleResponse Cut(Vec normal, double offset) { return {false, {std::move(normal), offset}}; }
};

using SeparationOracle = std::function<OracleResponse(const Vec&)>;
using Objective = std::function<double(const Vec&)>;
using Subgradient = std::function<Vec(const Vec&)>;

enum class OutcomeKind { feasible, minimizer, empty };

struct Outcome {
  OutcomeKind kind = OutcomeKind::empty;
  Vec point;
  double objective = std::numeric_limits<double>::infinity();
  std::size_t visited_feasible = 0;
  std::size_t iterations = 0;
  std::size_t max_constraints = 0;
  bool exact_optimum = false;  // zero subgradient hit
  bool stalled = false;
  bool collapsed = false;  // polytope became numerically degenerate
};

struct TraceRecord {
  std::size_t iter = 0;
  bool drop = false;
  std::size_t constraints = 0;
  std::optional<bool> feasible;
  std::optional<double> objective;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// JSON-lines writer for TraceRecord.
inline TraceSink json_lines_trace(std::ostream& os) {
  return [&os](const TraceRecord& r) {
    os << "{\"iter\":" << r.iter << ",\"action\":\"" << (r.drop ? "drop" : "add")
       << "\",\"constraints\":" << r.constraints;
    if (r.feasible) os << ",\"feasible\":" << (*r.feasible ? "true" : "false");
    if (r.objective) os << ",\"objective\":" << *r.objective;
    os << "}\n";
  };
}

/// Number of iterations after which vol(S_T) < vol(2^{-L} B^k), for a box of radius rho.
/// Natural logarithms; L is floored at log2(k).
inline std::size_t iteration_budget(std::size_t k, double L, double rho, const SolverConfig& cfg) {
  if (k < 1) throw std::invalid_argument("iteration_budget: k >= 1");
  if (!(rho > 0.0) || !(L > 0.0)) throw std::invalid_argument("iteration_budget: rho, L > 0");
  const double kk = static_cast<double>(k);
  const double Lf = std::max(L, std::log2(kk));
  const double bracket = 1.4 * Lf + 2.0 * std::log(kk) + 2.0 * std::log(1.0 + 1.0 / cfg.eps) +
                         0.5 * std::log((1.0 + cfg.tau) / (1.0 - cfg.eps)) + 2.0 * std::log(rho) - std::log(2.0);
  const double T = std::ceil(kk * bracket / cfg.delta_v);
  if (!(T >= 1.0)) {
    std::clog << "c11fit: iteration budget " << T << " is not positive; clamped to 1\n";
    return 1;
  }
  if (T > 1e18) return static_cast<std::size_t>(1e18);
  return static_cast<std::size_t>(T);
}

namespace detail {

class CuttingPlane {
 public:
  CuttingPlane(std::size_t k, const SolverConfig& cfg, TraceSink trace)
      : k_(k), cfg_(cfg), trace_(std::move(trace)), poly_(Polytope::box(k, cfg.rho)) {
    if (cfg.max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters >= 1");
  }

  Outcome run(const SeparationOracle& feas, const Objective* obj, const Subgradient* sub) {
    Outcome out;
    Vec x = poly_.interior_point();
    std::size_t since_improve = 0;
    double best_at_window = std::numeric_limits<double>::infinity();
    const std::size_t window = cfg_.stall_window_factor * k_;

    for (std::size_t it = 1; it <= cfg_.max_iters; ++it) {
      out.iterations = it;
      CenterInfo c;
      try {
        c = volumetric_center(poly_, x, cfg_.center);
      } catch (const NumericalFailure&) {
        out.collapsed = true;
        break;
      }
      x = c.x;

      TraceRecord rec;
      rec.iter = it;

      Eigen::Index weakest = 0;
      const double min_lev = c.leverage.minCoeff(&weakest);
      if (min_lev < cfg_.tau && poly_.size() > k_ + 1) {
        poly_.remove(static_cast<std::size_t>(weakest));
        rec.drop = true;
        rec.constraints = poly_.size();
        if (trace_) trace_(rec);
        continue;
      }

      OracleResponse resp = feas(x);
      rec.feasible = resp.inside;
      if (resp.inside) {
        if (obj == nullptr) {
          out.kind = OutcomeKind::feasible;
          out.point = x;
          out.visited_feasible = 1;
          if (trace_) trace_(rec);
          break;
        }
        const double fx = (*obj)(x);
        rec.objective = fx;
        ++out.visited_feasible;
        if (fx < out.objective) {
          out.objective = fx;
          out.point = x;
          out.kind = OutcomeKind::minimizer;
        }
        const Vec g = (*sub)(x);
        if (g.norm() <= 1e-12) {
          out.exact_optimum = true;
          out.objective = fx;
          out.point = x;
          out.kind = OutcomeKind::minimizer;
          if (trace_) trace_(rec);
          break;
        }
        resp = OracleResponse::Cut(g, g.dot(x));

        if (cfg_.stall_tol > 0.0) {
          if (out.objective < best_at_window - cfg_.stall_tol) {
            best_at_window = out.objective;
            since_improve = 0;
          } else if (++since_improve >= window) {
            out.stalled = true;
            if (trace_) trace_(rec);
            break;
          }
        }
      } else if (out.kind == OutcomeKind::minimizer) {
        // Feasibility cuts must keep every feasible point seen so far.
        const double lhs = resp.cut.normal.dot(out.point);
        const double scale = 1e-9 * (1.0 + std::abs(resp.cut.offset) + resp.cut.normal.norm() * out.point.norm());
        if (lhs > resp.cut.offset + scale)
          throw ProtocolError("separation oracle cut off a point it previously certified as inside");
      }

      try {
        add_cut(resp.cut, x, c);
      } catch (const NumericalFailure&) {
        out.collapsed = true;
        rec.constraints = poly_.size();
        if (trace_) trace_(rec);
        break;
      }
      out.max_constraints = std::max(out.max_constraints, poly_.size());
      if (poly_.size() > 201 * k_) throw std::logic_error("cutting plane: constraint bound 201k exceeded");
      rec.constraints = poly_.size();
      if (trace_) trace_(rec);
      x = poly_.interior_point();
    }
    out.max_constraints = std::max(out.max_constraints, poly_.size());
    if (out.kind != OutcomeKind::feasible && out.kind != OutcomeKind::minimizer) out.kind = OutcomeKind::empty;
    return out;
  }

  const Polytope& polytope() const { return poly_; }

 private:
  void add_cut(const Halfspace& h, const Vec& x, const CenterInfo& c) {
    const double norm = h.normal.norm();
    if (!(norm > 0.0) || !h.normal.allFinite() || !std::isfinite(h.offset))
      throw ProtocolError("separation oracle returned a degenerate cut");
    const double wx = h.normal.dot(x);
    const double slackness = 1e-9 * (1.0 + std::abs(wx) + norm * x.norm());
    if (h.offset > wx + slackness) throw ProtocolError("separation oracle cut does not separate the query point");

    // Dikin radius of the normal at the center: sqrt(w^T H^{-1} w).
    const Vec v = c.scaled_llt.matrixL().solve(c.scale.cwiseProduct(h.normal));
    const double radius = v.norm();
    const double depth = std::min(std::max(0.0, wx - h.offset), cfg_.max_cut_depth * radius);
    const double r = 0.5 * (depth / radius + 1.0);
    const Vec step = c.scale.cwiseProduct(c.scaled_llt.matrixU().solve(v)) / radius;  // H^{-1} w / radius

    poly_.add({h.normal, wx - depth});
    Vec xn = x - r * step;
    if (!(poly_.slacks(xn).minCoeff() > 0.0)) {
      // Rounding at a nearly collapsed polytope; fall back to a half-length step.
      xn = x - 0.5 * (depth / radius + r) * step;
    }
    if (!(poly_.slacks(xn).minCoeff() > 0.0)) throw NumericalFailure("cutting plane: lost interior after cut");
    poly_.set_interior_point(std::move(xn));
  }

  std::size_t k_;
  SolverConfig cfg_;
  TraceSink trace_;
  Polytope poly_;
};

}  // namespace detail

/// Finds a point the oracle accepts, or reports that none was found within the budget.
inline Outcome run_feasibility(std::size_t k, const SeparationOracle& oracle, const SolverConfig& cfg,
                               TraceSink trace = {}) {
  detail::CuttingPlane cp(k, cfg, std::move(trace));
  return cp.run(oracle, nullptr, nullptr);
}

/// Minimizes a convex objective over the oracle's set. Returns the best feasible iterate.
inline Outcome run_minimize(std::size_t k, const SeparationOracle& feas, const Objective& objective,
                            const Subgradient& subgradient, const SolverConfig& cfg, TraceSink trace = {}) {
  detail::CuttingPlane cp(k, cfg, std::move(trace));
  return cp.run(feas, &objective, &subgradient);
}

}  // namespace c11fit
