#pragma once

// Le Gruyer's Gamma^1 functional on 1-fields.
//
// Gamma^1(P) is the smallest Lip(grad F) over all C^{1,1} functions F whose jets
// on E equal P. It is computed exactly by a pairwise formula
//
//   Gamma^1(P) = max_{a != b} sqrt(A(a,b)^2 + B(a,b)^2) + |A(a,b)|,
//   A(a,b) = [2 (f(a) - f(b)) + (D_a f + D_b f) . (b - a)] / |a - b|^2,
//   B(a,b) = |D_a f - D_b f| / |a - b|,
//
// and, for testing, by brute force over the ball form
//
//   Gamma^1(P) = 2 max_{a != b} sup_{x in B((a+b)/2, |a-b|/2)} (P_a(x) - P_b(x)) / (|a-x|^2 + |b-x|^2).

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include "c11fit/field.hpp"

namespace c11fit {

struct PairStats {
  double A = 0.0;
  double B = 0.0;
};

/// Argmax pair of the Gamma^1 scan, oriented so that P_a(z) - P_b(z) >= 0.
struct PairCertificate {
  std::size_t a = 0;
  std::size_t b = 0;
  double A = 0.0;      // >= 0 by orientation
  double B = 0.0;
  double gamma = 0.0;  // sqrt(A^2 + B^2) + A
  Vec z;               // maximizer of the ball-form ratio for (a, b)
};

struct Gamma1Result {
  double value = 0.0;
  std::optional<PairCertificate> cert;  // empty when n < 2
};

inline PairStats pair_stats(const OneField& P, std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("pair_stats: indices must differ");
  if (i >= P.size() || j >= P.size()) throw std::out_of_range("pair_stats: index out of range");
  const Vec ab = P.point(j) - P.point(i);
  const double dist2 = ab.squaredNorm();
  if (!(dist2 > 0.0)) throw std::domain_error("pair_stats: identical points");
  const double A = (2.0 * (P.value(i) - P.value(j)) + (P.gradient(i) + P.gradient(j)).dot(ab)) / dist2;
  const double B = (P.gradient(i) - P.gradient(j)).norm() / std::sqrt(dist2);
  return {A, B};
}

/// z = (a+b)/2 + (D_a f - D_b f) / (2 gamma) for the oriented pair (i, j).
inline Vec critical_point(const OneField& P, std::size_t i, std::size_t j, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("critical_point: gamma must be positive");
  return 0.5 * (P.point(i) + P.point(j)) + (P.gradient(i) - P.gradient(j)) / (2.0 * gamma);
}

/// Exact O(n^2) scan. Ties within 1e-12 keep the lexicographically smallest (i, j), i < j.
inline Gamma1Result gamma1(const OneField& P) {
  Gamma1Result out;
  const std::size_t n = P.size();
  if (n < 2) return out;

  double best = -1.0;
  std::size_t bi = 0, bj = 1;
  PairStats bs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const PairStats s = pair_stats(P, i, j);
      const double v = std::hypot(s.A, s.B) + std::abs(s.A);
      if (v > best + 1e-12) {
        best = v;
        bi = i;
        bj = j;
        bs = s;
      }
    }
  }

  PairCertificate c;
  // A is antisymmetric in (a, b); the orientation with A >= 0 has its maximizer in the ball.
  if (bs.A >= 0.0) {
    c.a = bi;
    c.b = bj;
  } else {
    c.a = bj;
    c.b = bi;
  }
  c.A = std::abs(bs.A);
  c.B = bs.B;
  c.gamma = best;
  c.z = best > 0.0 ? critical_point(P, c.a, c.b, best) : Vec(0.5 * (P.point(c.a) + P.point(c.b)));
  out.value = best;
  out.cert = std::move(c);
  return out;
}

/// 2 (P_a(x) - P_b(x)) / (|a-x|^2 + |b-x|^2).
template <typename Derived>
double pair_ratio(const OneField& P, std::size_t a, std::size_t b, const Eigen::MatrixBase<Derived>& x) {
  const double den = (P.point(a) - x).squaredNorm() + (P.point(b) - x).squaredNorm();
  return 2.0 * (P.jet(a, x) - P.jet(b, x)) / den;
}

/// Grid lower bound for Gamma^1 from the ball form. Intended for tests (d <= 3, small n).
///
/// Each pair is sampled on a uniform grid over the bounding box of its ball, discarding
/// nodes outside the closed ball. Both orientations are covered by taking |ratio|.
inline double gamma1_bruteforce(const OneField& P, int grid_per_axis) {
  if (P.size() < 2) throw std::invalid_argument("gamma1_bruteforce: need n >= 2");
  if (grid_per_axis < 2) throw std::invalid_argument("gamma1_bruteforce: grid_per_axis >= 2");
  const std::size_t d = P.dim();
  if (d > 3) throw std::invalid_argument("gamma1_bruteforce: d <= 3 only");

  std::size_t total = 1;
  for (std::size_t t = 0; t < d; ++t) total *= static_cast<std::size_t>(grid_per_axis);

  double best = 0.0;
  Vec x(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < P.size(); ++i) {
    for (std::size_t j = i + 1; j < P.size(); ++j) {
      const Vec c = 0.5 * (P.point(i) + P.point(j));
      const double r = 0.5 * (P.point(i) - P.point(j)).norm();
      const double step = 2.0 * r / (grid_per_axis - 1);
      for (std::size_t node = 0; node < total; ++node) {
        std::size_t rem = node;
        for (std::size_t t = 0; t < d; ++t) {
          const auto idx = static_cast<double>(rem % static_cast<std::size_t>(grid_per_axis));
          rem /= static_cast<std::size_t>(grid_per_axis);
          x(static_cast<Eigen::Index>(t)) = c(static_cast<Eigen::Index>(t)) - r + step * idx;
        }
        if ((x - c).squaredNorm() > r * r * (1.0 + 1e-12)) continue;
        best = std::max(best, std::abs(pair_ratio(P, i, j, x)));
      }
    }
  }
  return best;
}

}  // namespace c11fit
