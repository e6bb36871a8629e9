#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "c11fit/gamma.hpp"
#include "c11fit/sim.hpp"

using namespace c11fit;

namespace {

Vec xy(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec target_gradient(const Vec& x) {
  const double r2 = x.squaredNorm();
  if (r2 >= 1.0) return Vec::Zero(2);
  const double pi = std::numbers::pi;
  const double e = std::exp(-1.0 / (1.0 - r2));
  const double c = std::cos(pi * x(0));
  const double s = std::sin(pi * x(1));
  const double q = -2.0 / ((1.0 - r2) * (1.0 - r2));  // d log e / dx_i = q x_i
  return xy(-pi * std::sin(pi * x(0)) * s * e + c * s * e * q * x(0), pi * c * std::cos(pi * x(1)) * e + c * s * e * q * x(1));
}

// Complex built from exact target jets at n sampled points, with M = gamma1.
CellComplex exact_jet_complex(std::size_t n, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  auto [base, y] = sample_data(cfg);
  Mat g(2, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) g.col(static_cast<Eigen::Index>(i)) = target_gradient(base[i]);
  const OneField P(base, y, g);
  return build_complex(P, gamma1(P).value);
}

SimConfig small_config(std::size_t n, double sigma, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.sigma = sigma;
  cfg.seed = seed;
  cfg.grid_per_axis = 32;
  return cfg;
}

}  // namespace

TEST(Target, ZeroOfSineFactor) { EXPECT_DOUBLE_EQ(target(xy(0.5, 0.0)), 0.0); }

TEST(Target, ZeroOutsideDisk) {
  EXPECT_EQ(target(xy(1.0, 0.0)), 0.0);
  EXPECT_EQ(target(xy(0.8, 0.6)), 0.0);
  EXPECT_EQ(target(xy(-3.0, 2.0)), 0.0);
}

TEST(Target, OnAxis) { EXPECT_NEAR(target(xy(0.0, 0.5)), 0.26359713811572677, 1e-15); }

TEST(Target, RejectsOtherDimensions) { EXPECT_THROW(target(Vec::Zero(3)), std::invalid_argument); }

TEST(Target, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.9, 0.9);
  for (int t = 0; t < 100; ++t) {
    const Vec x = xy(U(rng), U(rng));
    if (x.norm() > 0.95) continue;
    const double h = 1e-6;
    const Vec g = target_gradient(x);
    for (int i = 0; i < 2; ++i) {
      Vec e = Vec::Zero(2);
      e(i) = h;
      EXPECT_NEAR((target(x + e) - target(x - e)) / (2 * h), g(i), 1e-6);
    }
  }
}

TEST(SampleData, NoiselessValuesAreTargetValues) {
  auto [base, y] = sample_data(small_config(50, 0.0, 1000));
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(y(static_cast<Eigen::Index>(i)), target(base[i]));
}

TEST(SampleData, PointsInsideOpenDisk) {
  auto [base, y] = sample_data(small_config(500, 0.1, 7));
  ASSERT_EQ(base.size(), 500u);
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_LT(base[i].norm(), 1.0);
}

TEST(SampleData, DeterministicForFixedSeed) {
  auto [b1, y1] = sample_data(small_config(40, 0.25, 1234));
  auto [b2, y2] = sample_data(small_config(40, 0.25, 1234));
  EXPECT_TRUE(b1.matrix() == b2.matrix());
  EXPECT_TRUE(y1 == y2);
  auto [b3, y3] = sample_data(small_config(40, 0.25, 1235));
  EXPECT_FALSE(b1.matrix() == b3.matrix());
}

TEST(SampleData, NoiseDoesNotMovePoints) {
  auto [b1, y1] = sample_data(small_config(40, 0.0, 5));
  auto [b2, y2] = sample_data(small_config(40, 0.5, 5));
  EXPECT_TRUE(b1.matrix() == b2.matrix());
  EXPECT_FALSE(y1 == y2);
}

TEST(SampleData, NoiseHasRequestedSpread) {
  const double sigma = 0.5;
  auto [base, y] = sample_data(small_config(4000, sigma, 11));
  double mean = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double e = y(static_cast<Eigen::Index>(i)) - target(base[i]);
    mean += e;
    sq += e * e;
  }
  mean /= 4000.0;
  const double sd = std::sqrt(sq / 4000.0 - mean * mean);
  EXPECT_NEAR(mean, 0.0, 4.0 * sigma / std::sqrt(4000.0));
  EXPECT_NEAR(sd, sigma, 0.05 * sigma);
}

TEST(SampleData, RejectsInvalidConfig) {
  SimConfig cfg = small_config(0, 0.0, 1);
  EXPECT_THROW(sample_data(cfg), std::invalid_argument);
  cfg = small_config(5, -1.0, 1);
  EXPECT_THROW(sample_data(cfg), std::invalid_argument);
  cfg = small_config(5, 0.0, 1);
  cfg.d = 3;
  EXPECT_THROW(sample_data(cfg), std::invalid_argument);
  cfg = small_config(5, 0.0, 1);
  cfg.grid_per_axis = 1;
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
}

TEST(Grid, CellCentered) {
  EXPECT_DOUBLE_EQ(grid_coordinate(0, 2), -0.5);
  EXPECT_DOUBLE_EQ(grid_coordinate(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(grid_coordinate(0, 128), -1.0 + 1.0 / 128.0);
  EXPECT_DOUBLE_EQ(grid_coordinate(127, 128), 1.0 - 1.0 / 128.0);
}

TEST(EvaluateErrors, PointCountInsideDisk) {
  const ErrorStats e = evaluate_errors([](const Vec&) { return 0.0; }, 128);
  EXPECT_EQ(e.count, 12892u);
}

TEST(EvaluateErrors, SelfComparisonIsZero) {
  const ErrorStats e = evaluate_errors(target, 64, target);
  EXPECT_EQ(e.sup_error, 0.0);
  EXPECT_EQ(e.rmse, 0.0);
}

TEST(EvaluateErrors, ConstantOffset) {
  const ErrorStats e = evaluate_errors([](const Vec& x) { return target(x) + 0.25; }, 16);
  EXPECT_NEAR(e.sup_error, 0.25, 1e-15);
  EXPECT_NEAR(e.rmse, 0.25, 1e-15);
}

TEST(EvaluateErrors, RmseNeverExceedsSup) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int t = 0; t < 20; ++t) {
    const double a = U(rng), b = U(rng), c = U(rng);
    const ErrorStats e = evaluate_errors([&](const Vec& x) { return a * x(0) * x(0) + b * x(1) + c; }, 24);
    EXPECT_LE(e.rmse, e.sup_error * (1.0 + 1e-12));
    EXPECT_GE(e.rmse, 0.0);
  }
}

TEST(EvaluateErrors, ExactJetsConverge) {
  const ErrorStats coarse = evaluate_errors(exact_jet_complex(20, 1000), 64);
  const ErrorStats fine = evaluate_errors(exact_jet_complex(160, 1000), 64);
  EXPECT_LT(fine.rmse, coarse.rmse);
  EXPECT_LT(fine.sup_error, coarse.sup_error);
  EXPECT_LT(fine.rmse, 0.5 * coarse.rmse);
}

TEST(RunExperiment, RecordsConfigAndErrors) {
  const ExperimentRecord r = run_experiment(small_config(6, 0.1, 1000));
  EXPECT_EQ(r.n, 6u);
  EXPECT_EQ(r.sigma, 0.1);
  EXPECT_EQ(r.seed, 1000u);
  EXPECT_DOUBLE_EQ(r.M, schedule_m(6, 2));
  EXPECT_GT(r.rmse, 0.0);
  EXPECT_LE(r.rmse, r.sup_error);
  EXPECT_GE(r.runtime_seconds, 0.0);
}

TEST(RunExperiment, FixedM) {
  SimConfig cfg = small_config(6, 0.0, 1001);
  cfg.fixed_M = 3.0;
  EXPECT_EQ(run_experiment(cfg).M, 3.0);
}

TEST(RunExperiment, Deterministic) {
  const ExperimentRecord a = run_experiment(small_config(8, 0.2, 1002));
  const ExperimentRecord b = run_experiment(small_config(8, 0.2, 1002));
  EXPECT_EQ(a.sup_error, b.sup_error);
  EXPECT_EQ(a.rmse, b.rmse);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.M, b.M);
}

TEST(RunExperiment, WritesSurface) {
  SimConfig cfg = small_config(5, 0.0, 1003);
  cfg.grid_per_axis = 8;
  cfg.surface_path = ::testing::TempDir() + "surface_test.csv";
  run_experiment(cfg);
  std::ifstream in(cfg.surface_path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x1,x2,value");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 64u);
}

TEST(RunSweep, EmptyListWritesHeaderOnly) {
  std::ostringstream os;
  EXPECT_TRUE(run_sweep({}, os).empty());
  EXPECT_EQ(os.str(), "n,sigma,seed,M,sup_error,rmse,runtime_seconds,iterations\n");
}

TEST(RunSweep, MatchesIndividualRuns) {
  const std::vector<SimConfig> cfgs{small_config(5, 0.0, 1000), small_config(7, 0.1, 1001), small_config(6, 0.0, 1002)};
  std::ostringstream os;
  const auto recs = run_sweep(cfgs, os, 2);
  ASSERT_EQ(recs.size(), 3u);
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    const ExperimentRecord r = run_experiment(cfgs[i]);
    EXPECT_EQ(recs[i].n, r.n);
    EXPECT_EQ(recs[i].rmse, r.rmse);
    EXPECT_EQ(recs[i].sup_error, r.sup_error);
  }
  std::istringstream in(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 4u);
}

TEST(RunSweep, InvalidConfigThrowsBeforeWriting) {
  std::ostringstream os;
  EXPECT_THROW(run_sweep({small_config(0, 0.0, 1)}, os), std::invalid_argument);
  EXPECT_TRUE(os.str().empty());
}
