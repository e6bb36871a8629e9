#pragma once

#include <cmath>
#include <limits>

#include "c11fit/erm.hpp"

namespace testing_util {

/// Projected gradient reference for the regression problem. The projection onto
/// { Gamma^1 <= M } is approximated by repeated Polyak steps on Gamma^1 - M, which is a
/// max of linear forms w.x / den over pair certificates. Projections use the metric that
/// weights gradient slots by the squared point separation, otherwise closely spaced
/// points leave the gradients almost frozen. Returns the best objective over iterates
/// with Gamma^1 <= M (1 + feas_tol); `iters` counts every gradient and projection step.
inline double reference_objective(const c11fit::RegressionProblem& prob, std::size_t iters, double feas_tol = 1e-6) {
  using namespace c11fit;
  const std::size_t n = prob.base.size();
  const std::size_t k = (prob.base.dim() + 1) * n;
  const double step = static_cast<double>(n) / 2.0;  // 1 / Lipschitz constant of the gradient
  Vec x = Vec::Zero(static_cast<Eigen::Index>(k));
  Vec metric_inv = Vec::Constant(static_cast<Eigen::Index>(k), 1.0 / (prob.base.separation() * prob.base.separation()));
  for (std::size_t i = 0; i < n; ++i) metric_inv(static_cast<Eigen::Index>(value_slot(i, prob.base.dim()))) = 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < iters; ++t) {
    const OneField P = OneField::from_flat(prob.base, x);
    const Gamma1Result g = gamma1(P);
    if (g.value > prob.M * (1.0 + feas_tol)) {
      const PairCertificate& c = *g.cert;
      const double den = 0.5 * ((c.z - P.point(c.a)).squaredNorm() + (c.z - P.point(c.b)).squaredNorm());
      const Vec s = feasibility_oracle(P, prob.M).cut.normal / den;
      const Vec dir = metric_inv.cwiseProduct(s);
      x -= (g.value - prob.M) / s.dot(dir) * dir;
      continue;
    }
    const ObjectiveValue o = objective_oracle(P, prob.y);
    best = std::min(best, o.value);
    x -= step * o.gradient;
  }
  return best;
}

}  // namespace testing_util
