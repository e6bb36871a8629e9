#pragma once

#include <random>

#include "c11fit/field.hpp"

namespace testing_util {

/// Points, values and gradients with entries drawn from U[-scale, scale].
inline c11fit::OneField random_field(std::mt19937_64& rng, std::size_t d, std::size_t n, double scale) {
  std::uniform_real_distribution<double> U(-scale, scale);
  const auto dd = static_cast<Eigen::Index>(d);
  const auto nn = static_cast<Eigen::Index>(n);
  c11fit::Mat pts(dd, nn), g(dd, nn);
  c11fit::Vec v(nn);
  for (Eigen::Index j = 0; j < nn; ++j) {
    for (Eigen::Index i = 0; i < dd; ++i) pts(i, j) = U(rng);
    for (Eigen::Index i = 0; i < dd; ++i) g(i, j) = U(rng);
    v(j) = U(rng);
  }
  return c11fit::OneField(c11fit::PointSet(pts), v, g);
}

}  // namespace testing_util
