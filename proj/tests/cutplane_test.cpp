#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "c11fit/cutplane.hpp"

using namespace c11fit;

namespace {

// Independent evaluation of 0.5 log det(sum w w^T / s^2).
double barrier_value(const Polytope& P, const Vec& x) {
  const Vec s = P.slacks(x);
  if (s.minCoeff() <= 0) return std::numeric_limits<double>::infinity();
  const Mat As = s.cwiseInverse().asDiagonal() * P.normals();
  const Mat H = As.transpose() * As;
  return 0.5 * std::log(H.determinant());
}

SeparationOracle box_oracle(const Vec& c, double half) {
  return [c, half](const Vec& v) {
    Eigen::Index j = 0;
    const double viol = (v - c).cwiseAbs().maxCoeff(&j);
    if (viol <= half) return OracleResponse::Inside();
    Vec w = Vec::Zero(v.size());
    const double sgn = v(j) > c(j) ? 1.0 : -1.0;
    w(j) = sgn;
    return OracleResponse::Cut(w, sgn * c(j) + half);
  };
}

SeparationOracle always_inside() {
  return [](const Vec&) { return OracleResponse::Inside(); };
}

SolverConfig config(double rho, double L, std::size_t k) {
  SolverConfig cfg;
  cfg.rho = rho;
  cfg.L = L;
  cfg.max_iters = iteration_budget(k, L, rho, cfg);
  return cfg;
}

}  // namespace

TEST(IterationBudget, FrozenValues) {
  const SolverConfig cfg;
  EXPECT_EQ(iteration_budget(1, 10, 1, cfg), 64648u);
  EXPECT_EQ(iteration_budget(2, 10, 1, cfg), 136788u);
  EXPECT_EQ(iteration_budget(4, 10, 2, cfg), 303550u);
  EXPECT_EQ(iteration_budget(12, 3, 5, cfg), 750068u);  // L floored at log2(12)
}

TEST(IterationBudget, DoublingRhoAddsFixedAmount) {
  const SolverConfig cfg;
  for (std::size_t k : {1u, 3u, 10u}) {
    const double expected = 2.0 * static_cast<double>(k) * std::log(2.0) / cfg.delta_v;
    const double diff = static_cast<double>(iteration_budget(k, 12, 2.0, cfg)) -
                        static_cast<double>(iteration_budget(k, 12, 1.0, cfg));
    EXPECT_NEAR(diff, expected, 1.0);
  }
}

TEST(IterationBudget, TinyRhoClampsToOne) {
  EXPECT_EQ(iteration_budget(1, 1, 1e-30, SolverConfig{}), 1u);
  EXPECT_THROW(iteration_budget(0, 1, 1, SolverConfig{}), std::invalid_argument);
}

TEST(VolumetricCenter, SymmetricBox) {
  const Polytope P = Polytope::box(4, 1.0);
  Vec x0 = Vec::Constant(4, 0.3);
  const auto c = volumetric_center(P, x0);
  EXPECT_LE(c.x.lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(VolumetricCenter, ExtraHalfspaceAgainstLineSearch) {
  Polytope P = Polytope::box(3, 1.0);
  P.add({Vec::Unit(3, 0), 0.0});
  P.set_interior_point(Vec::Constant(3, -0.5));
  const auto c = volumetric_center(P, P.interior_point());
  EXPECT_LT(c.x(0), 0.0);
  EXPECT_NEAR(c.x(1), 0.0, 1e-6);
  EXPECT_NEAR(c.x(2), 0.0, 1e-6);

  // By symmetry the minimizer lies on the first axis: golden-section search there.
  double lo = -0.999, hi = -1e-3;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto V = [&](double t) { return barrier_value(P, t * Vec::Unit(3, 0)); };
  for (int i = 0; i < 200; ++i) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (V(a) < V(b)) hi = b; else lo = a;
  }
  EXPECT_NEAR(c.x(0), 0.5 * (lo + hi), 1e-6);
  EXPECT_NEAR(c.barrier, V(c.x(0)), 1e-10);
}

TEST(VolumetricCenter, TranslationEquivariance) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  const std::size_t k = 3;
  Polytope P = Polytope::box(k, 1.0);
  for (int i = 0; i < 4; ++i) {
    Vec w(3);
    for (auto& e : w) e = N(rng);
    P.add({w, 0.4 * w.norm()});
  }
  Vec t(3);
  t << 0.7, -1.3, 2.1;
  Polytope Q(k);
  for (std::size_t i = 0; i < P.size(); ++i) {
    const auto h = P.halfspace(i);
    Q.add({h.normal, h.offset + h.normal.dot(t)});
  }
  Q.set_interior_point(t);
  const auto cp = volumetric_center(P, Vec::Zero(3));
  const auto cq = volumetric_center(Q, t);
  EXPECT_LE((cq.x - cp.x - t).norm(), 1e-8);
}

TEST(VolumetricCenter, NotInteriorThrows) {
  const Polytope P = Polytope::box(2, 1.0);
  EXPECT_THROW(volumetric_center(P, Vec::Constant(2, 2.0)), NumericalFailure);
}

TEST(Polytope, InvalidOperations) {
  Polytope P = Polytope::box(2, 1.0);
  EXPECT_THROW(P.add({Vec::Zero(2), 1.0}), std::invalid_argument);
  EXPECT_THROW(P.add({Vec::Zero(3), 1.0}), std::invalid_argument);
  EXPECT_THROW(P.set_interior_point(Vec::Constant(2, 1.0)), std::invalid_argument);
  EXPECT_THROW(P.remove(4), std::out_of_range);
  EXPECT_THROW(Polytope::box(2, 0.0), std::invalid_argument);
}

TEST(Feasibility, WholeBoxIsFoundImmediately) {
  const auto out = run_feasibility(3, always_inside(), config(1, 10, 3));
  ASSERT_EQ(out.kind, OutcomeKind::feasible);
  EXPECT_EQ(out.iterations, 1u);
  EXPECT_LE(out.point.norm(), 1e-12);
}

TEST(FeasibilityProperty, SmallBoxesAreFound) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + trial % 4;
    Vec c(static_cast<Eigen::Index>(k));
    for (auto& e : c) e = U(rng);
    const auto cfg = config(1.0, 10.0, k);
    const auto oracle = box_oracle(c, 0.1);
    const auto out = run_feasibility(k, oracle, cfg);
    ASSERT_EQ(out.kind, OutcomeKind::feasible) << trial;
    EXPECT_TRUE(oracle(out.point).inside);
    EXPECT_LE(out.iterations, cfg.max_iters);
    EXPECT_LE(out.max_constraints, 201 * k);
  }
}

TEST(Feasibility, EmptyTargetGivesCertificate) {
  // K = {v : v_1 <= -2} does not meet the box of radius 1.
  const SeparationOracle oracle = [](const Vec& v) {
    if (v(0) <= -2.0) return OracleResponse::Inside();
    return OracleResponse::Cut(Vec::Unit(v.size(), 0), -2.0);
  };
  SolverConfig cfg = config(1.0, 10.0, 2);
  const auto out = run_feasibility(2, oracle, cfg);
  EXPECT_EQ(out.kind, OutcomeKind::empty);
  EXPECT_FALSE(out.point.size() > 0 && oracle(out.point).inside);
}

TEST(Feasibility, TraceIsJsonLines) {
  std::ostringstream os;
  Vec c(2);
  c << 0.4, -0.3;
  run_feasibility(2, box_oracle(c, 0.1), config(1, 10, 2), json_lines_trace(os));
  std::istringstream in(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(line.rfind("{\"iter\":", 0), 0u);
    EXPECT_NE(line.find("\"action\":"), std::string::npos);
    EXPECT_EQ(line.back(), '}');
  }
  EXPECT_GT(lines, 1u);
}

TEST(Minimize, QuadraticInterior) {
  const std::size_t k = 3;
  SolverConfig cfg = config(1.0, 10.0, k);
  cfg.max_iters = 4000;
  const Objective f = [](const Vec& v) { return v.squaredNorm(); };
  const Subgradient g = [](const Vec& v) { return Vec(2.0 * v); };
  const auto out = run_minimize(k, always_inside(), f, g, cfg);
  ASSERT_EQ(out.kind, OutcomeKind::minimizer);
  // The box center is the exact minimizer and is the first query.
  EXPECT_TRUE(out.exact_optimum);
  EXPECT_LE(out.objective, 1e-6);
}

TEST(Minimize, ShiftedQuadratic) {
  const std::size_t k = 3;
  Vec t(3);
  t << 0.3, -0.2, 0.55;
  SolverConfig cfg = config(1.0, 10.0, k);
  cfg.max_iters = 5000;
  const Objective f = [t](const Vec& v) { return (v - t).squaredNorm(); };
  const Subgradient g = [t](const Vec& v) { return Vec(2.0 * (v - t)); };
  const auto out = run_minimize(k, always_inside(), f, g, cfg);
  ASSERT_EQ(out.kind, OutcomeKind::minimizer);
  EXPECT_LE(out.objective, 1e-6);
}

TEST(Minimize, LinearObjectiveEpsilonSolution) {
  // min v_1 over [-1,1]^2: g* = -1, sup g = 1, vol K = 4.
  const std::size_t k = 2;
  const double L = 10.0;
  const auto cfg = config(1.0, L, k);
  const Objective f = [](const Vec& v) { return v(0); };
  const Subgradient g = [](const Vec& v) { return Vec(Vec::Unit(v.size(), 0)); };

  std::vector<double> history;
  const TraceSink trace = [&](const TraceRecord& r) {
    if (r.objective) history.push_back(*r.objective);
  };
  const auto out = run_minimize(k, always_inside(), f, g, cfg, trace);
  ASSERT_EQ(out.kind, OutcomeKind::minimizer);
  const double eps = std::sqrt(M_PI * std::pow(2.0, -2.0 * L) / 4.0);
  EXPECT_LE(out.objective - (-1.0), eps * (1.0 - (-1.0)));
  EXPECT_LE(out.max_constraints, 201 * k);

  double best = std::numeric_limits<double>::infinity();
  for (double h : history) best = std::min(best, h);
  EXPECT_EQ(best, out.objective);
}

TEST(Minimize, FeasibilityAndObjectiveCuts) {
  // min -(v_1 + v_2) over the disc of radius 0.5; optimum -0.5 sqrt(2).
  const std::size_t k = 2;
  SolverConfig cfg = config(1.0, 10.0, k);
  cfg.max_iters = 3000;
  const SeparationOracle disc = [](const Vec& v) {
    const double r = v.norm();
    if (r <= 0.5) return OracleResponse::Inside();
    return OracleResponse::Cut(v / r, 0.5);
  };
  const Objective f = [](const Vec& v) { return -v.sum(); };
  const Subgradient g = [](const Vec& v) { return Vec(-Vec::Ones(v.size())); };

  std::vector<double> best_so_far;
  double best = std::numeric_limits<double>::infinity();
  const TraceSink trace = [&](const TraceRecord& r) {
    if (r.objective) best = std::min(best, *r.objective);
    best_so_far.push_back(best);
  };
  const auto out = run_minimize(k, disc, f, g, cfg, trace);
  ASSERT_EQ(out.kind, OutcomeKind::minimizer);
  EXPECT_NEAR(out.objective, -0.5 * std::sqrt(2.0), 1e-5);
  EXPECT_LE(out.point.norm(), 0.5 + 1e-12);
  for (std::size_t i = 1; i < best_so_far.size(); ++i) EXPECT_LE(best_so_far[i], best_so_far[i - 1]);
}

TEST(Minimize, StallRuleStopsEarly) {
  const std::size_t k = 2;
  SolverConfig cfg = config(1.0, 10.0, k);
  cfg.stall_tol = 1e-3;
  const Objective f = [](const Vec& v) { return v(0); };
  const Subgradient g = [](const Vec& v) { return Vec(Vec::Unit(v.size(), 0)); };
  const auto out = run_minimize(k, always_inside(), f, g, cfg);
  EXPECT_TRUE(out.stalled);
  EXPECT_LT(out.iterations, cfg.max_iters);
  EXPECT_LE(out.objective, -1.0 + 1e-2);
}

TEST(Minimize, NoFeasibleIterateIsEmpty) {
  SolverConfig cfg = config(1.0, 10.0, 1);
  cfg.max_iters = 200;
  const SeparationOracle never = [](const Vec& v) { return OracleResponse::Cut(Vec::Ones(v.size()), -5.0); };
  const Objective f = [](const Vec& v) { return v(0); };
  const Subgradient g = [](const Vec& v) { return Vec(Vec::Ones(v.size())); };
  const auto out = run_minimize(1, never, f, g, cfg);
  EXPECT_EQ(out.kind, OutcomeKind::empty);
}

TEST(Minimize, OracleContradictionIsProtocolError) {
  // Certifies everything with v_1 >= 0 as inside, then starts cutting it away.
  int calls = 0;
  const SeparationOracle fickle = [&](const Vec& v) {
    ++calls;
    if (calls < 3) return OracleResponse::Inside();
    return OracleResponse::Cut(Vec::Unit(v.size(), 0), v(0) - 10.0);
  };
  SolverConfig cfg = config(1.0, 10.0, 2);
  cfg.max_iters = 50;
  const Objective f = [](const Vec& v) { return v(1); };
  const Subgradient g = [](const Vec& v) { return Vec(Vec::Unit(v.size(), 1)); };
  EXPECT_THROW(run_minimize(2, fickle, f, g, cfg), ProtocolError);
}

TEST(Minimize, Deterministic) {
  const std::size_t k = 3;
  SolverConfig cfg = config(1.0, 10.0, k);
  cfg.max_iters = 600;
  const SeparationOracle disc = [](const Vec& v) {
    const double r = v.norm();
    if (r <= 0.7) return OracleResponse::Inside();
    return OracleResponse::Cut(v / r, 0.7);
  };
  const Objective f = [](const Vec& v) { return std::abs(v(0) - 0.2) + v(2); };
  const Subgradient g = [](const Vec& v) {
    Vec s = Vec::Zero(v.size());
    s(0) = v(0) >= 0.2 ? 1.0 : -1.0;
    s(2) = 1.0;
    return s;
  };
  std::ostringstream a, b;
  const auto o1 = run_minimize(k, disc, f, g, cfg, json_lines_trace(a));
  const auto o2 = run_minimize(k, disc, f, g, cfg, json_lines_trace(b));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(o1.point, o2.point);
  EXPECT_EQ(o1.objective, o2.objective);
}
