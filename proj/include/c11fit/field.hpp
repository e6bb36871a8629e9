#pragma once

// Point sets and 1-fields (a value and a gradient attached to every point).

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace c11fit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Finite set of distinct points in R^d, stored column-wise.
class PointSet {
 public:
  PointSet() = default;

  /// Points are the columns of `points`. Throws if empty or if two points coincide.
  explicit PointSet(Mat points) : pts_(std::move(points)) {
    if (pts_.cols() < 1) throw std::invalid_argument("PointSet: need at least one point");
    if (pts_.rows() < 1) throw std::invalid_argument("PointSet: dimension must be >= 1");
    if (!pts_.allFinite()) throw std::invalid_argument("PointSet: non-finite coordinate");
    sep_ = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pts_.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < pts_.cols(); ++j) {
        sep_ = std::min(sep_, (pts_.col(i) - pts_.col(j)).norm());
      }
    }
    if (!(sep_ > 0.0)) throw std::invalid_argument("PointSet: duplicate points");
  }

  static PointSet from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("PointSet: need at least one point");
    const std::size_t d = rows.front().size();
    Mat pts(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[j].size() != d) throw std::invalid_argument("PointSet: ragged coordinates");
      for (std::size_t i = 0; i < d; ++i) pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
    }
    return PointSet(std::move(pts));
  }

  std::size_t size() const { return static_cast<std::size_t>(pts_.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(pts_.rows()); }
  auto operator[](std::size_t i) const { return pts_.col(static_cast<Eigen::Index>(i)); }
  const Mat& matrix() const { return pts_; }

  /// Minimum pairwise Euclidean distance (+inf for a single point).
  double separation() const { return sep_; }

 private:
  Mat pts_;
  double sep_ = std::numeric_limits<double>::infinity();
};

/// A 1-field P: a -> f(a) + D_a f . (x - a) over a PointSet.
///
/// The flat layout used by the solvers is per point (value, gradient_1..gradient_d),
/// points in base order, k = (d+1) n scalars in total.
class OneField {
 public:
  OneField() = default;

  OneField(PointSet base, Vec values, Mat gradients)
      : base_(std::move(base)), values_(std::move(values)), grads_(std::move(gradients)) {
    const auto n = static_cast<Eigen::Index>(base_.size());
    const auto d = static_cast<Eigen::Index>(base_.dim());
    if (values_.size() != n) throw std::invalid_argument("OneField: values length != n");
    if (grads_.rows() != d || grads_.cols() != n)
      throw std::invalid_argument("OneField: gradients must be d x n");
  }

  /// Zero gradients everywhere.
  static OneField with_values(PointSet base, Vec values) {
    Mat g = Mat::Zero(static_cast<Eigen::Index>(base.dim()), static_cast<Eigen::Index>(base.size()));
    return OneField(std::move(base), std::move(values), std::move(g));
  }

  static OneField from_flat(PointSet base, const Vec& flat) {
    const auto n = static_cast<Eigen::Index>(base.size());
    const auto d = static_cast<Eigen::Index>(base.dim());
    if (flat.size() != (d + 1) * n) throw std::invalid_argument("OneField: flat vector has wrong length");
    Vec v(n);
    Mat g(d, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v(i) = flat((d + 1) * i);
      g.col(i) = flat.segment((d + 1) * i + 1, d);
    }
    return OneField(std::move(base), std::move(v), std::move(g));
  }

  Vec flatten() const {
    const auto n = static_cast<Eigen::Index>(size());
    const auto d = static_cast<Eigen::Index>(dim());
    Vec flat((d + 1) * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      flat((d + 1) * i) = values_(i);
      flat.segment((d + 1) * i + 1, d) = grads_.col(i);
    }
    return flat;
  }

  std::size_t size() const { return base_.size(); }
  std::size_t dim() const { return base_.dim(); }
  std::size_t flat_size() const { return (dim() + 1) * size(); }

  const PointSet& base() const { return base_; }
  auto point(std::size_t i) const { return base_[i]; }
  double value(std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }
  auto gradient(std::size_t i) const { return grads_.col(static_cast<Eigen::Index>(i)); }
  const Vec& values() const { return values_; }
  const Mat& gradients() const { return grads_; }

  /// Evaluate the jet attached to point i at x.
  template <typename Derived>
  double jet(std::size_t i, const Eigen::MatrixBase<Derived>& x) const {
    return value(i) + gradient(i).dot(x - point(i));
  }

 private:
  PointSet base_;
  Vec values_;
  Mat grads_;
};

/// Offset of point i's value slot in the flat layout.
inline std::size_t value_slot(std::size_t i, std::size_t dim) { return (dim + 1) * i; }
/// Offset of point i's first gradient slot in the flat layout.
inline std::size_t gradient_slot(std::size_t i, std::size_t dim) { return (dim + 1) * i + 1; }

}  // namespace c11fit
