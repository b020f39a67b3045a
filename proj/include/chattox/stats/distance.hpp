#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string_view>

#include "chattox/error.hpp"
#include "chattox/taxonomy.hpp"

namespace chattox::stats {

enum class Metric { BrayCurtis, Euclidean };

inline std::string_view to_string(Metric m) {
  return m == Metric::BrayCurtis ? "bray_curtis" : "euclidean";
}

template <typename Scalar = double>
using SubclassVector = Eigen::Matrix<Scalar, static_cast<int>(kSubclassCount), 1>;

/// Relative frequencies over the eight subclasses plus the number of
/// messages they summarize. All zeros when count_basis is 0.
template <typename Scalar = double>
struct SubclassDistribution {
  SubclassVector<Scalar> frequencies = SubclassVector<Scalar>::Zero();
  std::size_t count_basis = 0;

  template <typename Derived>
  static SubclassDistribution from_counts(const Eigen::MatrixBase<Derived>& counts) {
    SubclassDistribution d;
    const Scalar total = counts.sum();
    d.count_basis = static_cast<std::size_t>(total);
    if (total > Scalar(0)) d.frequencies = counts.template cast<Scalar>() / total;
    return d;
  }
};

/// Symmetric, zero-diagonal pairwise dissimilarities.
template <typename Scalar = double>
struct DistanceMatrix {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;
  Metric metric = Metric::BrayCurtis;

  Eigen::Index size() const { return values.rows(); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return values(i, j); }
};

/// sum|u - v| / sum(u + v); 0 when both vectors are all-zero.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar bray_curtis(const Eigen::MatrixBase<DerivedA>& u,
                                      const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar denom = (u + v).sum();
  if (denom == Scalar(0)) return Scalar(0);
  return (u - v).cwiseAbs().sum() / denom;
}

/// Pairwise distances between the rows of `rows`.
template <typename Derived>
DistanceMatrix<typename Derived::Scalar> distance_matrix(const Eigen::MatrixBase<Derived>& rows,
                                                         Metric metric) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = rows.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "distance_matrix: need at least two rows");
  if (metric == Metric::BrayCurtis && (rows.array() < Scalar(0)).any()) {
    throw Error(ErrorCode::NegativeInput, "Bray-Curtis requires non-negative entries");
  }
  DistanceMatrix<Scalar> d;
  d.metric = metric;
  d.values.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar v = metric == Metric::BrayCurtis ? bray_curtis(rows.row(i), rows.row(j))
                                                    : (rows.row(i) - rows.row(j)).norm();
      d.values(i, j) = v;
      d.values(j, i) = v;
    }
  }
  return d;
}

template <typename Scalar>
DistanceMatrix<Scalar> distance_matrix(std::span<const SubclassDistribution<Scalar>> rows,
                                       Metric metric) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, static_cast<int>(kSubclassCount)> m(
      static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kSubclassCount));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = rows[i].frequencies.transpose();
  }
  return distance_matrix(m, metric);
}

}  // namespace chattox::stats
