#pragma once

// Simulation harness: bump target on the unit disk, noisy uniform samples, fit, extend,
// and measure errors on a uniform grid.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "c11fit/erm.hpp"
#include "c11fit/field.hpp"
#include "c11fit/wells.hpp"

namespace c11fit {

struct SimConfig {
  std::size_t n = 84;
  double sigma = 0.0;
  std::uint64_t seed = 1000;
  std::size_t d = 2;
  std::size_t grid_per_axis = 128;
  std::optional<double> fixed_M;  // empty: schedule_m(n, d)
  double gamma_tol = 0.0;         // <= 0: solver default
  // Iteration cap max(iters_per_unknown * 3n, min_iters); iters_per_unknown = 0 runs the
  // full budget. Ignored when solver.max_iters is set.
  std::size_t iters_per_unknown = 16;
  std::size_t min_iters = 2000;
  SolveOptions solver = default_sim_solver();
  std::string surface_path;  // empty: no surface CSV

  static SolveOptions default_sim_solver() {
    SolveOptions o;
    o.center.tol = 1e-1;
    return o;
  }
};

struct ExperimentRecord {
  std::size_t n = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double M = 0.0;
  double sup_error = 0.0;
  double rmse = 0.0;
  double runtime_seconds = 0.0;
  std::size_t iterations = 0;
};

struct ErrorStats {
  double sup_error = 0.0;
  double rmse = 0.0;
  std::size_t count = 0;  // grid points inside the disk
};

/// cos(pi x1) sin(pi x2) exp(-1 / (1 - |x|^2)) on the open unit disk, 0 elsewhere.
inline double target(const Vec& x) {
  if (x.size() != 2) throw std::invalid_argument("target: dimension must be 2");
  const double r2 = x.squaredNorm();
  if (r2 >= 1.0) return 0.0;
  return std::cos(std::numbers::pi * x(0)) * std::sin(std::numbers::pi * x(1)) * std::exp(-1.0 / (1.0 - r2));
}

namespace detail {

// Uniform on [0, 1) from the top 53 bits; fixed so that samples match across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller, cosine branch only: one normal per two uniforms.
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline void validate(const SimConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("SimConfig: n must be >= 1");
  if (cfg.d != 2) throw std::invalid_argument("SimConfig: only d = 2 is supported");
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) throw std::invalid_argument("SimConfig: sigma must be >= 0");
  if (cfg.grid_per_axis < 2) throw std::invalid_argument("SimConfig: grid_per_axis must be >= 2");
  if (cfg.fixed_M && !(*cfg.fixed_M > 0.0)) throw std::invalid_argument("SimConfig: M must be positive");
}

}  // namespace detail

/// n points uniform on the unit disk (rejection from the square) and noisy target values.
/// All points are drawn first, then the noise, from one mt19937_64 stream seeded by cfg.seed.
inline std::pair<PointSet, Vec> sample_data(const SimConfig& cfg) {
  detail::validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  const auto n = static_cast<Eigen::Index>(cfg.n);
  Mat pts(2, n);
  for (Eigen::Index i = 0; i < n;) {
    const double a = 2.0 * detail::unit_uniform(rng) - 1.0;
    const double b = 2.0 * detail::unit_uniform(rng) - 1.0;
    if (a * a + b * b < 1.0) {
      pts(0, i) = a;
      pts(1, i) = b;
      ++i;
    }
  }
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = target(pts.col(i));
  if (cfg.sigma > 0.0)
    for (Eigen::Index i = 0; i < n; ++i) y(i) += cfg.sigma * detail::standard_normal(rng);
  return {PointSet(std::move(pts)), std::move(y)};
}

/// Coordinate of grid index i on a cell-centered grid of g points over [-1, 1].
inline double grid_coordinate(std::size_t i, std::size_t g) {
  return -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(g);
}

/// Sup and RMS of truth - fhat over the cell-centered g x g grid points with |x| < 1.
inline ErrorStats evaluate_errors(const std::function<double(const Vec&)>& fhat, std::size_t grid_per_axis,
                                  const std::function<double(const Vec&)>& truth = target) {
  if (grid_per_axis < 2) throw std::invalid_argument("evaluate_errors: grid_per_axis must be >= 2");
  ErrorStats out;
  double sum_sq = 0.0;
  Vec x(2);
  for (std::size_t i = 0; i < grid_per_axis; ++i)
    for (std::size_t j = 0; j < grid_per_axis; ++j) {
      x << grid_coordinate(i, grid_per_axis), grid_coordinate(j, grid_per_axis);
      if (x.squaredNorm() >= 1.0) continue;
      const double e = std::abs(truth(x) - fhat(x));
      out.sup_error = std::max(out.sup_error, e);
      sum_sq += e * e;
      ++out.count;
    }
  if (out.count > 0) out.rmse = std::sqrt(sum_sq / static_cast<double>(out.count));
  return out;
}

inline ErrorStats evaluate_errors(const CellComplex& cx, std::size_t grid_per_axis) {
  return evaluate_errors([&](const Vec& x) { return eval(cx, x).value; }, grid_per_axis);
}

/// Full grid (including points outside the disk) as x1,x2,value.
inline void write_surface_csv(std::ostream& os, const CellComplex& cx, std::size_t grid_per_axis) {
  os.precision(17);
  os << "x1,x2,value\n";
  Vec x(2);
  for (std::size_t i = 0; i < grid_per_axis; ++i)
    for (std::size_t j = 0; j < grid_per_axis; ++j) {
      x << grid_coordinate(i, grid_per_axis), grid_coordinate(j, grid_per_axis);
      os << x(0) << ',' << x(1) << ',' << eval(cx, x).value << '\n';
    }
}

/// sample -> M -> solve -> build_complex -> evaluate_errors. Throws SolverFailure when the
/// solver finds no feasible field.
inline ExperimentRecord run_experiment(const SimConfig& cfg) {
  detail::validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  auto [base, y] = sample_data(cfg);
  const double M = cfg.fixed_M ? *cfg.fixed_M : schedule_m(cfg.n, cfg.d);
  SolveOptions opt = cfg.solver;
  if (opt.max_iters == 0 && cfg.iters_per_unknown > 0)
    opt.max_iters = std::max(cfg.iters_per_unknown * (cfg.d + 1) * cfg.n, cfg.min_iters);
  const SolveReport rep = solve(RegressionProblem{base, y, M, cfg.gamma_tol}, opt);
  // The solver guarantees gamma1 <= M up to rounding; never build below the field's own constant.
  const CellComplex cx = build_complex(rep.field, std::max(M, rep.gamma1_value));
  const ErrorStats err = evaluate_errors(cx, cfg.grid_per_axis);
  if (!cfg.surface_path.empty()) {
    std::ofstream os(cfg.surface_path);
    if (!os) throw std::runtime_error("cannot write " + cfg.surface_path);
    write_surface_csv(os, cx, cfg.grid_per_axis);
  }
  ExperimentRecord rec;
  rec.n = cfg.n;
  rec.sigma = cfg.sigma;
  rec.seed = cfg.seed;
  rec.M = M;
  rec.sup_error = err.sup_error;
  rec.rmse = err.rmse;
  rec.iterations = rep.iterations;
  rec.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

inline void write_records_header(std::ostream& os) {
  os << "n,sigma,seed,M,sup_error,rmse,runtime_seconds,iterations\n";
}

inline void write_record(std::ostream& os, const ExperimentRecord& r) {
  const auto saved = os.precision(17);
  os << r.n << ',' << r.sigma << ',' << r.seed << ',' << r.M << ',' << r.sup_error << ',' << r.rmse << ',';
  os.precision(6);
  os << r.runtime_seconds << ',' << r.iterations << '\n';
  os.precision(saved);
}

/// Runs every config on up to `workers` threads and writes the header and one CSV row per
/// finished run. Rows appear in completion order; the returned records are in input order.
/// The first exception raised by any run is rethrown after all workers stop.
inline std::vector<ExperimentRecord> run_sweep(const std::vector<SimConfig>& configs, std::ostream& os,
                                               std::size_t workers = 1) {
  for (const SimConfig& c : configs) detail::validate(c);
  write_records_header(os);
  std::vector<ExperimentRecord> out(configs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i; !failed && (i = next++) < configs.size();) {
      try {
        out[i] = run_experiment(configs[i]);
        const std::lock_guard lock(mu);
        write_record(os, out[i]);
        os.flush();
      } catch (...) {
        const std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(workers, configs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace c11fit
