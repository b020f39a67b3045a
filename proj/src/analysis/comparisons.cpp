#include "chattox/analysis/comparisons.hpp"

#include <map>

#include "chattox/error.hpp"
#include "chattox/stats/univariate.hpp"

namespace chattox::analysis {

std::vector<stats::SubclassVector<double>> stream_primary_counts(const LabeledCorpusView& view) {
  std::vector<stats::SubclassVector<double>> counts(view.corpus().streams.size(),
                                                    stats::SubclassVector<double>::Zero());
  for (const auto& m : view.messages()) {
    if (m.status == LabelStatus::Toxic && m.primary) {
      counts[m.stream](static_cast<Eigen::Index>(index_of(*m.primary))) += 1.0;
    }
  }
  return counts;
}

HighLowReport high_low_comparison(const LabeledCorpusView& view, double alpha) {
  const std::size_t n_streams = view.corpus().streams.size();
  std::vector<std::size_t> total(n_streams, 0);
  std::vector<std::size_t> toxic(n_streams, 0);
  for (const auto& m : view.messages()) {
    ++total[m.stream];
    if (m.status == LabelStatus::Toxic) ++toxic[m.stream];
  }
  std::vector<double> rate(n_streams, 0.0);
  double sum = 0.0;
  std::size_t rated = 0;
  for (std::size_t s = 0; s < n_streams; ++s) {
    if (total[s] == 0) continue;
    rate[s] = static_cast<double>(toxic[s]) / static_cast<double>(total[s]);
    sum += rate[s];
    ++rated;
  }
  if (rated == 0) throw Error(ErrorCode::DegenerateSplit, "no streams with messages");

  HighLowReport report;
  report.alpha = alpha;
  report.threshold = sum / static_cast<double>(rated);

  const auto counts = stream_primary_counts(view);
  std::vector<std::size_t> high;
  std::vector<std::size_t> low;
  for (std::size_t s = 0; s < n_streams; ++s) {
    if (total[s] == 0) continue;
    if (counts[s].sum() == 0.0) {
      ++report.excluded_streams;
      continue;
    }
    (rate[s] >= report.threshold ? high : low).push_back(s);
  }
  report.high_streams = high.size();
  report.low_streams = low.size();
  if (high.size() < 2 || low.size() < 2) {
    throw Error(ErrorCode::DegenerateSplit,
                "high/low split needs two streams with toxic messages per side (high " +
                    std::to_string(high.size()) + ", low " + std::to_string(low.size()) + ")");
  }

  for (Subclass sub : kAllSubclasses) {
    const auto k = static_cast<Eigen::Index>(index_of(sub));
    auto shares = [&](const std::vector<std::size_t>& streams) {
      std::vector<double> out;
      out.reserve(streams.size());
      for (std::size_t s : streams) out.push_back(counts[s](k) / counts[s].sum());
      return out;
    };
    const std::vector<double> h = shares(high);
    const std::vector<double> l = shares(low);

    SubclassComparison row;
    row.subclass = sub;
    row.mean_high = stats::mean(h);
    row.mean_low = stats::mean(l);
    row.levene = stats::levene({h, l});
    try {
      if (row.levene.p_value < alpha) {
        row.route = "welch_t";
        row.test = stats::welch_t(h, l);
      } else {
        row.route = "anova";
        row.test = stats::anova_oneway({h, l});
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
      row.route = "degenerate";
      row.test = stats::TestResult{0.0, 1.0, std::nullopt, std::nullopt, "degenerate"};
    }
    row.significant = row.test.p_value < alpha;
    report.rows.push_back(std::move(row));
  }
  return report;
}

PairwiseReport pairwise_distribution_tests(const LabeledCorpusView& view, GroupBy unit,
                                           const PairwiseConfig& config) {
  const auto counts = stream_primary_counts(view);
  PairwiseReport report;
  report.unit = unit;

  std::map<std::string, std::vector<std::size_t>> units;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const auto key = view.group_key(s, unit);
    if (!key) continue;
    auto& members = units[*key];
    if (counts[s].sum() == 0.0) {
      ++report.excluded_streams;
      continue;
    }
    members.push_back(s);
  }
  for (const auto& [name, members] : units) {
    if (members.size() < 2) {
      throw Error(ErrorCode::UnitTooSmall, "'" + name + "' has " +
                                               std::to_string(members.size()) +
                                               " stream(s) with toxic messages; need 2");
    }
  }

  for (auto a = units.begin(); a != units.end(); ++a) {
    for (auto b = std::next(a); b != units.end(); ++b) {
      const auto& sa = a->second;
      const auto& sb = b->second;
      Eigen::MatrixXd rows(static_cast<Eigen::Index>(sa.size() + sb.size()),
                           static_cast<Eigen::Index>(kSubclassCount));
      std::vector<int> groups;
      Eigen::Index r = 0;
      for (std::size_t s : sa) {
        rows.row(r++) = (counts[s] / counts[s].sum()).transpose();
        groups.push_back(0);
      }
      for (std::size_t s : sb) {
        rows.row(r++) = (counts[s] / counts[s].sum()).transpose();
        groups.push_back(1);
      }
      const auto d = stats::distance_matrix(rows, config.metric);
      const stats::PermutationPlan plan{config.n_permutations, config.seed, false,
                                        config.threads};
      PairwiseComparisonRow row;
      row.unit_a = a->first;
      row.unit_b = b->first;
      row.streams_a = sa.size();
      row.streams_b = sb.size();
      row.permanova = stats::permanova(d, groups, plan);
      row.permdisp = stats::permdisp(d, groups, plan);
      row.dispersion_caveat =
          row.permanova.p_value < config.alpha && row.permdisp.p_value < config.alpha;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace chattox::analysis
