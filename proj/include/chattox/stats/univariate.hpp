#pragma once

#include <span>
#include <vector>

#include "chattox/stats/result.hpp"

namespace chattox::stats {

using Groups = std::vector<std::vector<double>>;

/// One-way ANOVA F with df (k-1, N-k).
/// Zero within and between variation is Error(DegenerateInput); zero within
/// variation alone gives F = +inf, p = 0.
TestResult anova_oneway(const Groups& groups);

/// Classic (mean-centred) Levene test. All-zero deviations return W = 0, p = 1.
TestResult levene(const Groups& groups);

/// Welch's unequal-variance t test, two-sided, Welch-Satterthwaite df.
TestResult welch_t(std::span<const double> a, std::span<const double> b);

/// Student t with pooled variance, two-sided.
TestResult pooled_t(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double sample_variance(std::span<const double> x);

}  // namespace chattox::stats
