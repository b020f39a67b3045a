#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "chattox/analysis/view.hpp"

namespace chattox::analysis {

struct RatioRow {
  std::string group;
  std::size_t toxic = 0;
  std::size_t invalid = 0;
  std::size_t total = 0;  // every message of the group, pre-labeled and invalid included
  double ratio = 0.0;     // toxic / total
  bool empty = false;
};

/// Toxic share per group, sorted by group key.
std::vector<RatioRow> toxicity_ratio(const LabeledCorpusView& view, GroupBy by);

enum class LabelLevel { Category, Subclass };
enum class LabelSlot { Primary, Secondary, Combined };

std::string_view to_string(LabelLevel level);
std::string_view to_string(LabelSlot slot);

struct PrevalenceRow {
  std::string group;
  std::string label;  // canonical category or subclass key
  std::size_t count = 0;
  std::size_t toxic = 0;  // denominator: toxic messages in the group
  double percent = 0.0;
};

/// Percentage of a group's toxic messages carrying each label in `slot`.
/// Combined counts a label once when either slot holds it (at category level,
/// any subclass of the category).
std::vector<PrevalenceRow> label_prevalence(const LabeledCorpusView& view, LabelLevel level,
                                            LabelSlot slot, GroupBy by);

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Primary x secondary counts; messages without a secondary label land in
/// `primary_only`. cells + primary_only = toxic messages.
struct CooccurrenceMatrix {
  LabelLevel level = LabelLevel::Subclass;
  CountMatrix counts;
  CountVector primary_only;
  std::int64_t toxic_total = 0;

  /// Messages whose primary or secondary label is `label`.
  std::int64_t containing(Eigen::Index label) const;
  double containing_percent(Eigen::Index label) const;
};

CooccurrenceMatrix cooccurrence(const LabeledCorpusView& view, LabelLevel level);

/// Collapses a subclass matrix onto categories.
CooccurrenceMatrix aggregate_to_categories(const CooccurrenceMatrix& subclass_matrix);

std::string label_key(LabelLevel level, Eigen::Index index);
Eigen::Index label_count(LabelLevel level);

}  // namespace chattox::analysis
