#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chattox::stats {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> df1;
  std::optional<double> df2;
  std::string method;  // "anova", "welch_t", "levene", ...
};

struct PermTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
  std::string method;  // "permanova" | "permdisp"
  bool exhaustive = false;
};

struct KappaResult {
  double kappa = 0.0;
  double observed_agreement = 0.0;
  double expected_agreement = 0.0;
};

/// "(F=44.12, p<0.001)" / "(t=18.66, p=0.021)".
std::string format_test(const TestResult& result);

}  // namespace chattox::stats
