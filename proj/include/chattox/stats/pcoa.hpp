#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <optional>
#include <numeric>
#include <vector>

#include "chattox/error.hpp"
#include "chattox/stats/distance.hpp"

namespace chattox::stats {

/// Principal coordinates. Axes are ordered by descending eigenvalue; axes
/// with negative eigenvalues are kept and flagged in `negative`. Coordinates
/// on axis k are eigenvector_k * sqrt(|lambda_k|).
template <typename Scalar = double>
struct Pcoa {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coordinates;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;
  std::vector<bool> negative;

  Eigen::Index axes() const { return eigenvalues.size(); }
};

/// Gower double-centering of -d^2/2.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gower_centered(
    const DistanceMatrix<Scalar>& d) {
  const Eigen::Index n = d.size();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
      Scalar(-0.5) * d.values.array().square().matrix();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> row_means = a.rowwise().mean();
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> col_means = a.colwise().mean();
  const Scalar grand = a.mean();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = a(i, j) - row_means(i) - col_means(j) + grand;
    }
  }
  return Scalar(0.5) * (g + g.transpose());
}

/// Relative eigenvalue cutoff: 1e-10, or the rounding noise of an n x n
/// eigensolve when Scalar is coarser than that.
template <typename Scalar>
Scalar default_null_tolerance(Eigen::Index n) {
  return std::max(Scalar(1e-10),
                  Scalar(64) * std::numeric_limits<Scalar>::epsilon() * static_cast<Scalar>(n));
}

/// Eigenvalues with |lambda| <= relative_tolerance * max|lambda| are treated
/// as null axes and dropped (default: default_null_tolerance).
template <typename Scalar>
Pcoa<Scalar> pcoa(const DistanceMatrix<Scalar>& d, std::optional<Scalar> relative_tolerance = {}) {
  const Eigen::Index n = d.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "pcoa: need at least two points");
  const Scalar tolerance = relative_tolerance.value_or(default_null_tolerance<Scalar>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver(
      gower_centered(d));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "pcoa: eigendecomposition did not converge");
  }
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  const Scalar scale = values.cwiseAbs().maxCoeff();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return values(x) > values(y); });
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k : order) {
    if (std::abs(values(k)) > tolerance * scale) kept.push_back(k);
  }

  Pcoa<Scalar> out;
  const auto m = static_cast<Eigen::Index>(kept.size());
  out.coordinates.resize(n, m);
  out.eigenvalues.resize(m);
  out.negative.resize(kept.size());
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::Index k = kept[static_cast<std::size_t>(c)];
    out.eigenvalues(c) = values(k);
    out.negative[static_cast<std::size_t>(c)] = values(k) < Scalar(0);
    out.coordinates.col(c) = vectors.col(k) * std::sqrt(std::abs(values(k)));
  }
  return out;
}

}  // namespace chattox::stats
