#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chattox/analysis/view.hpp"
#include "chattox/stats/distance.hpp"
#include "chattox/stats/permutation.hpp"
#include "chattox/stats/result.hpp"

namespace chattox::analysis {

inline constexpr double kDefaultAlpha = 0.05;

struct SubclassComparison {
  Subclass subclass{};
  std::string route;  // "anova", "welch_t" or "degenerate" (no variation at all)
  stats::TestResult levene;
  stats::TestResult test;
  double mean_high = 0.0;
  double mean_low = 0.0;
  bool significant = false;
};

struct HighLowReport {
  double threshold = 0.0;  // mean of per-stream toxic ratios
  std::size_t high_streams = 0;
  std::size_t low_streams = 0;
  std::size_t excluded_streams = 0;  // streams without toxic messages
  double alpha = kDefaultAlpha;
  std::vector<SubclassComparison> rows;
};

/// Splits streams at the mean per-stream toxic ratio (ties go high) and
/// compares per-stream primary-label subclass shares between the sides.
/// Levene p < alpha routes a subclass to Welch's t, otherwise one-way ANOVA.
HighLowReport high_low_comparison(const LabeledCorpusView& view, double alpha = kDefaultAlpha);

/// Primary-label subclass counts per stream.
std::vector<stats::SubclassVector<double>> stream_primary_counts(const LabeledCorpusView& view);

struct PairwiseConfig {
  std::size_t n_permutations = stats::kDefaultPermutations;
  std::uint64_t seed = 0;
  double alpha = kDefaultAlpha;
  stats::Metric metric = stats::Metric::BrayCurtis;
  unsigned threads = 1;
};

struct PairwiseComparisonRow {
  std::string unit_a;
  std::string unit_b;
  std::size_t streams_a = 0;
  std::size_t streams_b = 0;
  stats::PermTestResult permanova;
  stats::PermTestResult permdisp;
  /// Significant location difference that may be a dispersion difference.
  bool dispersion_caveat = false;
};

struct PairwiseReport {
  GroupBy unit = GroupBy::Game;
  std::vector<PairwiseComparisonRow> rows;
  std::size_t excluded_streams = 0;  // streams without toxic messages
};

/// PERMANOVA + PERMDISP for every pair of units on per-stream primary-label
/// distributions. Error(UnitTooSmall) if a unit has fewer than two usable streams.
PairwiseReport pairwise_distribution_tests(const LabeledCorpusView& view, GroupBy unit,
                                           const PairwiseConfig& config);

}  // namespace chattox::analysis
