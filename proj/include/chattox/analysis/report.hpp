#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>

#include "chattox/analysis/agreement.hpp"
#include "chattox/analysis/benchmark.hpp"
#include "chattox/analysis/comparisons.hpp"
#include "chattox/analysis/metrics.hpp"
#include "chattox/classifier.hpp"

namespace chattox::analysis {

using Json = nlohmann::ordered_json;

/// Non-finite values become the strings "inf", "-inf" and "nan".
Json number(double v);
/// Fixed two decimals.
std::string fixed2(double v);

Json to_json(const stats::TestResult& r);
Json to_json(const stats::PermTestResult& r);
Json to_json(std::span<const RatioRow> rows);
Json to_json(std::span<const PrevalenceRow> rows);
Json to_json(const CooccurrenceMatrix& m);
Json to_json(const HighLowReport& r);
Json to_json(const PairwiseReport& r);
Json to_json(const AgreementReport& r);
Json to_json(const F1Report& r);
Json to_json(const ClassificationSummary& s);

/// Two side-by-side (name, percent) column pairs, descending by percent.
std::string render_ratio_table(std::span<const RatioRow> rows, std::string_view name_header);

/// Categories with their subclasses as rows; one primary and one secondary
/// column per group.
std::string render_prevalence_table(const LabeledCorpusView& view, GroupBy by);

std::string render_cooccurrence(const CooccurrenceMatrix& m);
std::string render_high_low(const HighLowReport& r);
std::string render_pairwise(const PairwiseReport& r);
std::string render_agreement(const AgreementReport& r);
std::string render_f1(const F1Report& r);

}  // namespace chattox::analysis
