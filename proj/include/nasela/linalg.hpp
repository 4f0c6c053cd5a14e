#pragma once

// Small dense helpers shared by the feature, analysis and clustering code.
// Point sets are stored row-wise: one observation per row.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nasela {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexVector = Eigen::VectorXi;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Full symmetric matrix of Euclidean distances between the rows of `points`.
template <typename Derived>
MatrixX<typename Derived::Scalar>
pairwise_distances(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  MatrixX<Scalar> dist = MatrixX<Scalar>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const Scalar d = (points.row(i) - points.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

/// Mean Euclidean distance over all unordered pairs of rows.
template <typename Derived>
typename Derived::Scalar
mean_pairwise_distance(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  if (n < 2) return std::numeric_limits<Scalar>::quiet_NaN();
  Scalar sum = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) sum += (points.row(i) - points.row(j)).norm();
  return sum / (static_cast<Scalar>(n) * static_cast<Scalar>(n - 1) / 2);
}

/// Sample standard deviation (n - 1 denominator).
template <typename Derived>
typename Derived::Scalar sample_sd(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  if (n < 2) return std::numeric_limits<Scalar>::quiet_NaN();
  const Scalar m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<Scalar>(n - 1));
}

/// Pearson correlation; NaN when either input has zero variance.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pearson(const Eigen::MatrixBase<DerivedA>& a,
                                  const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const auto ca = (a.array() - a.mean()).eval();
  const auto cb = (b.array() - b.mean()).eval();
  const Scalar saa = ca.square().sum();
  const Scalar sbb = cb.square().sum();
  if (!(saa > 0) || !(sbb > 0)) return std::numeric_limits<Scalar>::quiet_NaN();
  const Scalar r = (ca * cb).sum() / std::sqrt(saa * sbb);
  return std::clamp(r, Scalar(-1), Scalar(1));
}

} // namespace nasela
