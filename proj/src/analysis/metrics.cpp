#include "chattox/analysis/metrics.hpp"

#include <map>

namespace chattox::analysis {

namespace {

struct GroupCounts {
  std::size_t total = 0;
  std::size_t toxic = 0;
  std::size_t invalid = 0;
  std::vector<std::size_t> labels;
};

Eigen::Index label_index(LabelLevel level, Subclass s) {
  return static_cast<Eigen::Index>(level == LabelLevel::Subclass ? index_of(s)
                                                                 : index_of(category_of(s)));
}

/// Group key per stream, computed once.
std::vector<std::optional<std::string>> stream_keys(const LabeledCorpusView& view, GroupBy by) {
  std::vector<std::optional<std::string>> keys;
  keys.reserve(view.corpus().streams.size());
  for (std::size_t s = 0; s < view.corpus().streams.size(); ++s) {
    keys.push_back(view.group_key(s, by));
  }
  return keys;
}

}  // namespace

std::string_view to_string(LabelLevel level) {
  return level == LabelLevel::Category ? "category" : "subclass";
}

std::string_view to_string(LabelSlot slot) {
  switch (slot) {
    case LabelSlot::Primary: return "primary";
    case LabelSlot::Secondary: return "secondary";
    case LabelSlot::Combined: return "combined";
  }
  return "";
}

Eigen::Index label_count(LabelLevel level) {
  return static_cast<Eigen::Index>(level == LabelLevel::Subclass ? kSubclassCount
                                                                 : kCategoryCount);
}

std::string label_key(LabelLevel level, Eigen::Index index) {
  const auto i = static_cast<std::size_t>(index);
  return std::string(level == LabelLevel::Subclass ? canonical_string(kAllSubclasses[i])
                                                   : canonical_string(kAllCategories[i]));
}

std::vector<RatioRow> toxicity_ratio(const LabeledCorpusView& view, GroupBy by) {
  const auto keys = stream_keys(view, by);
  std::map<std::string, GroupCounts> groups;
  for (const auto& key : keys) {
    if (key) groups.try_emplace(*key);
  }
  for (const auto& m : view.messages()) {
    const auto& key = keys[m.stream];
    if (!key) continue;
    GroupCounts& g = groups[*key];
    ++g.total;
    if (m.status == LabelStatus::Toxic) ++g.toxic;
    if (m.status == LabelStatus::Invalid) ++g.invalid;
  }
  std::vector<RatioRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, g] : groups) {
    RatioRow r;
    r.group = key;
    r.toxic = g.toxic;
    r.invalid = g.invalid;
    r.total = g.total;
    r.empty = g.total == 0;
    r.ratio = r.empty ? 0.0 : static_cast<double>(g.toxic) / static_cast<double>(g.total);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<PrevalenceRow> label_prevalence(const LabeledCorpusView& view, LabelLevel level,
                                            LabelSlot slot, GroupBy by) {
  const auto keys = stream_keys(view, by);
  const auto n_labels = static_cast<std::size_t>(label_count(level));
  std::map<std::string, GroupCounts> groups;
  for (const auto& key : keys) {
    if (key) groups.try_emplace(*key).first->second.labels.assign(n_labels, 0);
  }
  for (const auto& m : view.messages()) {
    const auto& key = keys[m.stream];
    if (!key || m.status != LabelStatus::Toxic) continue;
    GroupCounts& g = groups[*key];
    ++g.toxic;
    std::vector<bool> present(n_labels, false);
    if (slot != LabelSlot::Secondary && m.primary) {
      present[static_cast<std::size_t>(label_index(level, *m.primary))] = true;
    }
    if (slot != LabelSlot::Primary && m.secondary) {
      present[static_cast<std::size_t>(label_index(level, *m.secondary))] = true;
    }
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (present[l]) ++g.labels[l];
    }
  }
  std::vector<PrevalenceRow> rows;
  for (const auto& [key, g] : groups) {
    for (std::size_t l = 0; l < n_labels; ++l) {
      PrevalenceRow r;
      r.group = key;
      r.label = label_key(level, static_cast<Eigen::Index>(l));
      r.count = g.labels[l];
      r.toxic = g.toxic;
      r.percent = g.toxic == 0 ? 0.0
                               : 100.0 * static_cast<double>(g.labels[l]) /
                                     static_cast<double>(g.toxic);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::int64_t CooccurrenceMatrix::containing(Eigen::Index label) const {
  return counts.row(label).sum() + counts.col(label).sum() - counts(label, label) +
         primary_only(label);
}

double CooccurrenceMatrix::containing_percent(Eigen::Index label) const {
  return toxic_total == 0 ? 0.0
                          : 100.0 * static_cast<double>(containing(label)) /
                                static_cast<double>(toxic_total);
}

CooccurrenceMatrix cooccurrence(const LabeledCorpusView& view, LabelLevel level) {
  CooccurrenceMatrix sub;
  sub.level = LabelLevel::Subclass;
  const Eigen::Index n = label_count(LabelLevel::Subclass);
  sub.counts = CountMatrix::Zero(n, n);
  sub.primary_only = CountVector::Zero(n);
  for (const auto& m : view.messages()) {
    if (m.status != LabelStatus::Toxic || !m.primary) continue;
    ++sub.toxic_total;
    const Eigen::Index p = label_index(LabelLevel::Subclass, *m.primary);
    if (m.secondary) {
      ++sub.counts(p, label_index(LabelLevel::Subclass, *m.secondary));
    } else {
      ++sub.primary_only(p);
    }
  }
  return level == LabelLevel::Subclass ? sub : aggregate_to_categories(sub);
}

CooccurrenceMatrix aggregate_to_categories(const CooccurrenceMatrix& subclass_matrix) {
  // Projection P (categories x subclasses): P * C * P^T sums blocks.
  const Eigen::Index nc = label_count(LabelLevel::Category);
  const Eigen::Index ns = label_count(LabelLevel::Subclass);
  CountMatrix projection = CountMatrix::Zero(nc, ns);
  for (Subclass s : kAllSubclasses) {
    projection(static_cast<Eigen::Index>(index_of(category_of(s))),
               static_cast<Eigen::Index>(index_of(s))) = 1;
  }
  CooccurrenceMatrix out;
  out.level = LabelLevel::Category;
  out.counts = projection * subclass_matrix.counts * projection.transpose();
  out.primary_only = projection * subclass_matrix.primary_only;
  out.toxic_total = subclass_matrix.toxic_total;
  return out;
}

}  // namespace chattox::analysis
