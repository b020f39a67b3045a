#include "chattox/stats/univariate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "chattox/error.hpp"
#include "chattox/stats/special.hpp"

namespace chattox::stats {

std::string format_test(const TestResult& result) {
  const bool is_t = result.method == "welch_t" || result.method == "pooled_t";
  char buf[96];
  if (result.p_value < 0.001) {
    std::snprintf(buf, sizeof buf, "(%s=%.2f, p<0.001)", is_t ? "t" : "F", result.statistic);
  } else {
    std::snprintf(buf, sizeof buf, "(%s=%.2f, p=%.3f)", is_t ? "t" : "F", result.statistic,
                  result.p_value);
  }
  return buf;
}

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

namespace {

void require_groups(const Groups& groups, const char* who) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, std::string(who) + ": need at least two groups");
  }
  for (const auto& g : groups) {
    if (g.size() < 2) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(who) + ": every group needs at least two values");
    }
  }
}

struct SumsOfSquares {
  double between = 0.0;
  double within = 0.0;
  std::size_t n = 0;
};

SumsOfSquares partition(const Groups& groups) {
  SumsOfSquares ss;
  double total = 0.0;
  for (const auto& g : groups) {
    total += std::accumulate(g.begin(), g.end(), 0.0);
    ss.n += g.size();
  }
  const double grand = total / static_cast<double>(ss.n);
  for (const auto& g : groups) {
    const double m = mean(g);
    ss.between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ss.within += (v - m) * (v - m);
  }
  return ss;
}

}  // namespace

TestResult anova_oneway(const Groups& groups) {
  require_groups(groups, "anova_oneway");
  const SumsOfSquares ss = partition(groups);
  const double df1 = static_cast<double>(groups.size() - 1);
  const double df2 = static_cast<double>(ss.n - groups.size());
  TestResult r;
  r.method = "anova";
  r.df1 = df1;
  r.df2 = df2;
  if (ss.within == 0.0) {
    if (ss.between == 0.0) {
      throw Error(ErrorCode::DegenerateInput, "anova_oneway: all values identical");
    }
    r.statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  r.statistic = (ss.between / df1) / (ss.within / df2);
  r.p_value = f_upper_tail(r.statistic, df1, df2);
  return r;
}

TestResult levene(const Groups& groups) {
  require_groups(groups, "levene");
  Groups deviations;
  deviations.reserve(groups.size());
  bool all_zero = true;
  for (const auto& g : groups) {
    const double m = mean(g);
    auto& d = deviations.emplace_back();
    d.reserve(g.size());
    for (double v : g) {
      d.push_back(std::fabs(v - m));
      if (d.back() != 0.0) all_zero = false;
    }
  }
  TestResult r;
  r.method = "levene";
  r.df1 = static_cast<double>(groups.size() - 1);
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  r.df2 = static_cast<double>(n - groups.size());
  if (all_zero) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  const TestResult f = anova_oneway(deviations);
  r.statistic = f.statistic;
  r.p_value = f.p_value;
  return r;
}

TestResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "welch_t: both samples need at least two values");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  const double diff = mean(a) - mean(b);
  TestResult r;
  r.method = "welch_t";
  const double se2 = va + vb;
  if (se2 == 0.0) {
    if (diff == 0.0) throw Error(ErrorCode::DegenerateInput, "welch_t: both samples constant");
    r.statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.df1 = na + nb - 2.0;
    r.p_value = 0.0;
    return r;
  }
  r.statistic = diff / std::sqrt(se2);
  r.df1 = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = t_two_sided(r.statistic, *r.df1);
  return r;
}

TestResult pooled_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "pooled_t: both samples need at least two values");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double df = na + nb - 2.0;
  const double sp2 =
      ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / df;
  const double diff = mean(a) - mean(b);
  TestResult r;
  r.method = "pooled_t";
  r.df1 = df;
  const double se = std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
  if (se == 0.0) {
    if (diff == 0.0) throw Error(ErrorCode::DegenerateInput, "pooled_t: both samples constant");
    r.statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_value = 0.0;
    return r;
  }
  r.statistic = diff / se;
  r.p_value = t_two_sided(r.statistic, df);
  return r;
}

}  // namespace chattox::stats
