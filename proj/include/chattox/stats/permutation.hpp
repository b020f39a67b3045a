#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <thread>
#include <vector>

#include "chattox/error.hpp"
#include "chattox/stats/distance.hpp"
#include "chattox/stats/pcoa.hpp"
#include "chattox/stats/result.hpp"
#include "chattox/stats/rng.hpp"

namespace chattox::stats {

inline constexpr std::size_t kDefaultPermutations = 9999;

struct PermutationPlan {
  std::size_t n_permutations = kDefaultPermutations;
  std::uint64_t seed = 0;
  /// Enumerate every distinct group assignment instead of sampling.
  bool exhaustive = false;
  /// Worker threads for the sampled loop; the result does not depend on it.
  unsigned threads = 1;
};

/// Group labels recoded to 0..k-1 in order of first sorted appearance.
struct GroupCoding {
  std::vector<int> codes;
  std::vector<std::size_t> sizes;

  int groups() const { return static_cast<int>(sizes.size()); }
};

inline GroupCoding encode_groups(std::span<const int> labels) {
  std::map<int, int> index;
  for (int l : labels) index.emplace(l, 0);
  int next = 0;
  for (auto& [label, code] : index) code = next++;
  GroupCoding g;
  g.sizes.assign(index.size(), 0);
  g.codes.reserve(labels.size());
  for (int l : labels) {
    g.codes.push_back(index[l]);
    ++g.sizes[static_cast<std::size_t>(g.codes.back())];
  }
  return g;
}

inline GroupCoding checked_groups(std::span<const int> labels, Eigen::Index n) {
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw Error(ErrorCode::InvalidArgument, "group labels do not match the distance matrix");
  }
  GroupCoding g = encode_groups(labels);
  if (g.groups() < 2) throw Error(ErrorCode::GroupTooSmall, "need at least two groups");
  for (std::size_t s : g.sizes) {
    if (s < 2) throw Error(ErrorCode::GroupTooSmall, "every group needs at least two members");
  }
  return g;
}

/// Statistic comparison used when counting permutations "at least as extreme".
/// Values within a relative 1e-10 of the observed statistic count as ties.
template <typename Scalar>
bool at_least(Scalar permuted, Scalar observed) {
  if (std::isinf(observed)) return permuted >= observed;
  const Scalar tol = Scalar(1e-10) * std::max(Scalar(1), std::abs(observed));
  return permuted >= observed - tol;
}

/// Runs the permutation loop for a statistic over group codes.
template <typename Scalar, typename Statistic>
PermTestResult permutation_p_value(Scalar observed, const GroupCoding& groups,
                                   Statistic&& statistic, const PermutationPlan& plan) {
  PermTestResult r;
  r.statistic = static_cast<double>(observed);
  r.seed = plan.seed;
  if (plan.exhaustive) {
    std::vector<int> labels = groups.codes;
    std::sort(labels.begin(), labels.end());
    std::size_t total = 0;
    std::size_t hits = 0;
    do {
      ++total;
      if (at_least(statistic(std::span<const int>(labels)), observed)) ++hits;
    } while (std::next_permutation(labels.begin(), labels.end()));
    r.exhaustive = true;
    r.n_permutations = total;
    r.p_value = static_cast<double>(hits) / static_cast<double>(total);
    return r;
  }

  if (plan.n_permutations < 1) {
    throw Error(ErrorCode::InvalidArgument, "need at least one permutation");
  }
  const std::size_t n = plan.n_permutations;
  auto count_range = [&](std::size_t begin, std::size_t end) {
    std::size_t hits = 0;
    std::vector<int> labels;
    for (std::size_t i = begin; i < end; ++i) {
      labels = groups.codes;
      CounterRng rng(plan.seed, i);
      rng.shuffle(std::span<int>(labels));
      if (at_least(statistic(std::span<const int>(labels)), observed)) ++hits;
    }
    return hits;
  };

  std::size_t hits = 0;
  const unsigned threads = std::max(1u, std::min<unsigned>(plan.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    hits = count_range(0, n);
  } else {
    std::vector<std::size_t> partial(threads, 0);
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          partial[t] = count_range(n * t / threads, n * (t + 1) / threads);
        });
      }
    }
    for (std::size_t h : partial) hits += h;
  }
  r.n_permutations = n;
  r.p_value = static_cast<double>(hits + 1) / static_cast<double>(n + 1);
  return r;
}

/// Pseudo-F from squared distances: SS_total = sum_{i<j} d2/N, SS_within =
/// sum over groups of sum_{i<j in g} d2/n_g, SS_between = SS_total - SS_within.
template <typename Scalar>
Scalar permanova_pseudo_f(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& d2,
                          std::span<const int> codes, std::span<const std::size_t> sizes) {
  const Eigen::Index n = d2.rows();
  const auto k = static_cast<Scalar>(sizes.size());
  Scalar total = 0;
  std::vector<Scalar> within(sizes.size(), Scalar(0));
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const Scalar v = d2(i, j);
      total += v;
      if (codes[static_cast<std::size_t>(i)] == codes[static_cast<std::size_t>(j)]) {
        within[static_cast<std::size_t>(codes[static_cast<std::size_t>(i)])] += v;
      }
    }
  }
  const Scalar ss_total = total / static_cast<Scalar>(n);
  Scalar ss_within = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    ss_within += within[g] / static_cast<Scalar>(sizes[g]);
  }
  const Scalar ss_between = std::max(Scalar(0), ss_total - ss_within);
  const Scalar scale = std::max(Scalar(1), ss_total);
  if (ss_within <= Scalar(1e-14) * scale) {
    return ss_between <= Scalar(1e-14) * scale ? Scalar(0)
                                                : std::numeric_limits<Scalar>::infinity();
  }
  return (ss_between / (k - Scalar(1))) / (ss_within / (static_cast<Scalar>(n) - k));
}

/// One-way PERMANOVA (Anderson's pseudo-F on a distance matrix).
template <typename Scalar>
PermTestResult permanova(const DistanceMatrix<Scalar>& d, std::span<const int> group_of,
                         const PermutationPlan& plan) {
  const GroupCoding groups = checked_groups(group_of, d.size());
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d2 =
      d.values.array().square().matrix();
  auto statistic = [&](std::span<const int> codes) {
    return permanova_pseudo_f<Scalar>(d2, codes, groups.sizes);
  };
  const Scalar observed = statistic(groups.codes);
  PermTestResult r;
  if (observed == Scalar(0)) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.seed = plan.seed;
    r.exhaustive = plan.exhaustive;
    r.n_permutations = plan.exhaustive ? 0 : plan.n_permutations;
    if (!plan.exhaustive && plan.n_permutations < 1) {
      throw Error(ErrorCode::InvalidArgument, "need at least one permutation");
    }
  } else {
    r = permutation_p_value(observed, groups, statistic, plan);
  }
  r.method = "permanova";
  return r;
}

template <typename Scalar>
PermTestResult permanova(const DistanceMatrix<Scalar>& d, std::span<const int> group_of,
                         std::size_t n_perm, std::uint64_t seed) {
  return permanova(d, group_of, PermutationPlan{n_perm, seed, false, 1});
}

/// One-way ANOVA F on `values` under group codes; 0 when there is no
/// variation at all and +inf when only between-group variation exists.
template <typename Scalar>
Scalar anova_f_statistic(std::span<const Scalar> values, std::span<const int> codes,
                         std::span<const std::size_t> sizes) {
  const std::size_t k = sizes.size();
  std::vector<Scalar> sums(k, Scalar(0));
  Scalar grand = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sums[static_cast<std::size_t>(codes[i])] += values[i];
    grand += values[i];
  }
  const auto n = static_cast<Scalar>(values.size());
  grand /= n;
  Scalar between = 0;
  for (std::size_t g = 0; g < k; ++g) {
    const Scalar m = sums[g] / static_cast<Scalar>(sizes[g]);
    between += static_cast<Scalar>(sizes[g]) * (m - grand) * (m - grand);
  }
  Scalar within = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto g = static_cast<std::size_t>(codes[i]);
    const Scalar m = sums[g] / static_cast<Scalar>(sizes[g]);
    within += (values[i] - m) * (values[i] - m);
  }
  Scalar scale = 0;
  for (Scalar v : values) scale = std::max(scale, std::abs(v));
  const Scalar eps = Scalar(1e-14) * std::max(Scalar(1), scale * scale) * n;
  if (within <= eps) return between <= eps ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
  return (between / static_cast<Scalar>(k - 1)) / (within / (n - static_cast<Scalar>(k)));
}

/// Distance of each point to its group centroid in principal-coordinate
/// space. Negative-eigenvalue axes subtract from the squared distance, which
/// is floored at zero before the square root.
template <typename Scalar>
std::vector<Scalar> centroid_distances(const Pcoa<Scalar>& ordination, const GroupCoding& groups) {
  const Eigen::Index n = ordination.coordinates.rows();
  const Eigen::Index m = ordination.coordinates.cols();
  const auto k = static_cast<Eigen::Index>(groups.sizes.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> centroids =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(k, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    centroids.row(groups.codes[static_cast<std::size_t>(i)]) += ordination.coordinates.row(i);
  }
  for (Eigen::Index g = 0; g < k; ++g) {
    centroids.row(g) /= static_cast<Scalar>(groups.sizes[static_cast<std::size_t>(g)]);
  }
  std::vector<Scalar> z(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto delta =
        ordination.coordinates.row(i) - centroids.row(groups.codes[static_cast<std::size_t>(i)]);
    Scalar sq = 0;
    for (Eigen::Index a = 0; a < m; ++a) {
      const Scalar c = delta(a) * delta(a);
      sq += ordination.negative[static_cast<std::size_t>(a)] ? -c : c;
    }
    z[static_cast<std::size_t>(i)] = std::sqrt(std::max(Scalar(0), sq));
  }
  return z;
}

/// PERMDISP: ANOVA F on distances to group centroids (in PCoA space);
/// the p-value permutes group labels over those fixed distances.
template <typename Scalar>
PermTestResult permdisp(const DistanceMatrix<Scalar>& d, std::span<const int> group_of,
                        const PermutationPlan& plan) {
  const GroupCoding groups = checked_groups(group_of, d.size());
  if (!plan.exhaustive && plan.n_permutations < 1) {
    throw Error(ErrorCode::InvalidArgument, "need at least one permutation");
  }
  PermTestResult r;
  r.method = "permdisp";
  r.seed = plan.seed;
  r.exhaustive = plan.exhaustive;

  if ((d.values.array() == Scalar(0)).all()) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.n_permutations = plan.exhaustive ? 0 : plan.n_permutations;
    return r;
  }
  const std::vector<Scalar> z = centroid_distances(pcoa(d), groups);
  auto statistic = [&](std::span<const int> codes) {
    return anova_f_statistic<Scalar>(z, codes, groups.sizes);
  };
  const Scalar observed = statistic(groups.codes);
  if (observed == Scalar(0)) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.n_permutations = plan.exhaustive ? 0 : plan.n_permutations;
    return r;
  }
  PermTestResult out = permutation_p_value(observed, groups, statistic, plan);
  out.method = "permdisp";
  return out;
}

template <typename Scalar>
PermTestResult permdisp(const DistanceMatrix<Scalar>& d, std::span<const int> group_of,
                        std::size_t n_perm, std::uint64_t seed) {
  return permdisp(d, group_of, PermutationPlan{n_perm, seed, false, 1});
}

}  // namespace chattox::stats
