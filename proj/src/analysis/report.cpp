#include "chattox/analysis/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace chattox::analysis {

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

std::string optional_fixed2(const std::optional<double>& v) { return v ? fixed2(*v) : "n/a"; }

std::string pad(std::string_view text, std::size_t width, bool right = false) {
  std::string out(text);
  if (out.size() >= width) return out;
  if (right) out.insert(0, width - out.size(), ' ');
  else out.append(width - out.size(), ' ');
  return out;
}

/// Left-aligned first column, right-aligned others.
std::string render_grid(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> widths;
  for (const auto& row : cells) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      line += pad(row[c], widths[c], c > 0);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

}  // namespace

Json to_json(const stats::TestResult& r) {
  Json j;
  j["method"] = r.method;
  j["statistic"] = number(r.statistic);
  j["p_value"] = number(r.p_value);
  j["df1"] = optional_number(r.df1);
  j["df2"] = optional_number(r.df2);
  return j;
}

Json to_json(const stats::PermTestResult& r) {
  Json j;
  j["method"] = r.method;
  j["statistic"] = number(r.statistic);
  j["p_value"] = number(r.p_value);
  j["n_permutations"] = r.n_permutations;
  j["seed"] = r.seed;
  j["exhaustive"] = r.exhaustive;
  return j;
}

Json to_json(std::span<const RatioRow> rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["group"] = r.group;
    j["toxic"] = r.toxic;
    j["invalid"] = r.invalid;
    j["total"] = r.total;
    j["ratio"] = number(r.ratio);
    j["invalid_ratio"] = number(r.total == 0 ? 0.0 : static_cast<double>(r.invalid) /
                                                        static_cast<double>(r.total));
    j["empty"] = r.empty;
    out.push_back(std::move(j));
  }
  return out;
}

Json to_json(std::span<const PrevalenceRow> rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["group"] = r.group;
    j["label"] = r.label;
    j["count"] = r.count;
    j["toxic"] = r.toxic;
    j["percent"] = number(r.percent);
    out.push_back(std::move(j));
  }
  return out;
}

Json to_json(const CooccurrenceMatrix& m) {
  Json j;
  j["level"] = std::string(to_string(m.level));
  const Eigen::Index n = m.counts.rows();
  Json labels = Json::array();
  for (Eigen::Index i = 0; i < n; ++i) labels.push_back(label_key(m.level, i));
  j["labels"] = labels;
  Json cells = Json::array();
  for (Eigen::Index i = 0; i < n; ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < n; ++k) row.push_back(m.counts(i, k));
    cells.push_back(std::move(row));
  }
  j["counts"] = cells;
  Json only = Json::array();
  for (Eigen::Index i = 0; i < n; ++i) only.push_back(m.primary_only(i));
  j["primary_only"] = only;
  j["toxic_total"] = m.toxic_total;
  Json containing = Json::object();
  for (Eigen::Index i = 0; i < n; ++i) {
    containing[label_key(m.level, i)] = number(m.containing_percent(i));
  }
  j["containing_percent"] = containing;
  return j;
}

Json to_json(const HighLowReport& r) {
  Json j;
  j["split"] = "mean of per-stream toxic ratios, ties high";
  j["threshold"] = number(r.threshold);
  j["high_streams"] = r.high_streams;
  j["low_streams"] = r.low_streams;
  j["excluded_streams"] = r.excluded_streams;
  j["alpha"] = r.alpha;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["subclass"] = std::string(canonical_string(row.subclass));
    x["route"] = row.route;
    x["levene"] = to_json(row.levene);
    x["test"] = to_json(row.test);
    x["mean_high"] = number(row.mean_high);
    x["mean_low"] = number(row.mean_low);
    x["significant"] = row.significant;
    rows.push_back(std::move(x));
  }
  j["rows"] = rows;
  return j;
}

Json to_json(const PairwiseReport& r) {
  Json j;
  j["unit"] = std::string(to_string(r.unit));
  j["excluded_streams"] = r.excluded_streams;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["unit_a"] = row.unit_a;
    x["unit_b"] = row.unit_b;
    x["streams_a"] = row.streams_a;
    x["streams_b"] = row.streams_b;
    x["permanova"] = to_json(row.permanova);
    x["permdisp"] = to_json(row.permdisp);
    x["dispersion_caveat"] = row.dispersion_caveat;
    rows.push_back(std::move(x));
  }
  j["rows"] = rows;
  return j;
}

namespace {

Json rater_json(const std::vector<RaterKappa>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json x;
    x["rater"] = r.rater;
    x["kappa"] = optional_number(r.kappa);
    x["items"] = r.items;
    out.push_back(std::move(x));
  }
  return out;
}

Json pair_json(const std::vector<PairKappa>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json x;
    x["rater_a"] = r.rater_a;
    x["rater_b"] = r.rater_b;
    x["kappa"] = optional_number(r.kappa);
    x["items"] = r.items;
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

Json to_json(const AgreementReport& r) {
  Json j;
  Json binary;
  binary["model_vs_human"] = rater_json(r.model_vs_human);
  binary["mean_model_vs_human"] = optional_number(r.mean_model_vs_human);
  binary["inter_human"] = pair_json(r.inter_human);
  binary["mean_inter_human"] = optional_number(r.mean_inter_human);
  j["binary"] = binary;
  Json sub;
  sub["model_vs_human"] = rater_json(r.subclass_model_vs_human);
  sub["mean_model_vs_human"] = optional_number(r.mean_subclass_model_vs_human);
  sub["inter_human"] = pair_json(r.subclass_inter_human);
  sub["mean_inter_human"] = optional_number(r.mean_subclass_inter_human);
  Json tally = Json::array();
  for (const auto& c : r.subclass_disagreements) {
    Json x;
    x["model"] = c.model_label;
    x["human"] = c.human_label;
    x["count"] = c.count;
    x["share"] = number(c.share);
    tally.push_back(std::move(x));
  }
  sub["disagreements"] = tally;
  j["subclass"] = sub;
  return j;
}

Json to_json(const F1Report& r) {
  Json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["tn"] = r.tn;
  j["invalid"] = r.invalid;
  j["precision"] = number(r.precision);
  j["recall"] = number(r.recall);
  j["f1"] = number(r.f1);
  return j;
}

Json to_json(const ClassificationSummary& s) {
  Json j;
  j["total_messages"] = s.total_messages;
  Json counts;
  for (auto status : {LabelStatus::PreNonToxic, LabelStatus::Bot, LabelStatus::NonToxic,
                      LabelStatus::Toxic, LabelStatus::Invalid}) {
    counts[std::string(to_string(status))] = s.count(status);
  }
  j["status_counts"] = counts;
  j["stage1_requests"] = s.stage1_requests;
  j["stage2_requests"] = s.stage2_requests;
  j["already_labeled"] = s.already_labeled;
  j["newly_labeled"] = s.newly_labeled;
  j["stage1_invalid"] = s.stage1_invalid;
  j["stage2_invalid"] = s.stage2_invalid;
  j["invalid_rate"] = number(s.invalid_rate());
  j["toxic_rate"] = number(s.toxic_rate());
  return j;
}

std::string render_ratio_table(std::span<const RatioRow> rows, std::string_view name_header) {
  std::vector<const RatioRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RatioRow* a, const RatioRow* b) { return a->ratio > b->ratio; });
  const std::size_t half = (sorted.size() + 1) / 2;
  std::vector<std::vector<std::string>> cells;
  cells.push_back({std::string(name_header), "Value", std::string(name_header), "Value"});
  for (std::size_t i = 0; i < half; ++i) {
    std::vector<std::string> line = {sorted[i]->group, fixed2(100.0 * sorted[i]->ratio)};
    if (i + half < sorted.size()) {
      line.push_back(sorted[i + half]->group);
      line.push_back(fixed2(100.0 * sorted[i + half]->ratio));
    }
    cells.push_back(std::move(line));
  }
  return render_grid(cells);
}

std::string render_prevalence_table(const LabeledCorpusView& view, GroupBy by) {
  // (level, slot) -> group -> label -> percent
  using Lookup = std::map<std::string, std::map<std::string, double>>;
  auto collect = [&](LabelLevel level, LabelSlot slot) {
    Lookup out;
    for (const auto& r : label_prevalence(view, level, slot, by)) out[r.group][r.label] = r.percent;
    return out;
  };
  const Lookup cat_primary = collect(LabelLevel::Category, LabelSlot::Primary);
  const Lookup cat_secondary = collect(LabelLevel::Category, LabelSlot::Secondary);
  const Lookup sub_primary = collect(LabelLevel::Subclass, LabelSlot::Primary);
  const Lookup sub_secondary = collect(LabelLevel::Subclass, LabelSlot::Secondary);

  std::vector<std::string> groups;
  for (const auto& [g, unused] : cat_primary) groups.push_back(g);

  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> banner = {""};
  for (std::size_t i = 0; i < groups.size(); ++i) banner.push_back(i == 0 ? "Primary (%)" : "");
  for (std::size_t i = 0; i < groups.size(); ++i) banner.push_back(i == 0 ? "Secondary (%)" : "");
  cells.push_back(banner);
  std::vector<std::string> header = {"Category"};
  for (int pass = 0; pass < 2; ++pass) header.insert(header.end(), groups.begin(), groups.end());
  cells.push_back(header);

  auto add_row = [&](std::string name, const Lookup& primary, const Lookup& secondary,
                     const std::string& key) {
    std::vector<std::string> line = {std::move(name)};
    for (const auto& g : groups) line.push_back(fixed2(primary.at(g).at(key)));
    for (const auto& g : groups) line.push_back(fixed2(secondary.at(g).at(key)));
    cells.push_back(std::move(line));
  };

  for (Category c : kAllCategories) {
    std::vector<Subclass> members;
    for (Subclass s : kAllSubclasses) {
      if (category_of(s) == c) members.push_back(s);
    }
    const std::string cat_key(canonical_string(c));
    if (members.size() == 1) {
      add_row(std::string(display_name(c)), cat_primary, cat_secondary, cat_key);
      continue;
    }
    add_row(std::string(display_name(c)) + " (overall)", cat_primary, cat_secondary, cat_key);
    for (Subclass s : members) {
      add_row("  " + std::string(display_name(s)), sub_primary, sub_secondary,
              std::string(canonical_string(s)));
    }
  }
  return render_grid(cells);
}

std::string render_cooccurrence(const CooccurrenceMatrix& m) {
  const Eigen::Index n = m.counts.rows();
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"primary \\ secondary"};
  for (Eigen::Index i = 0; i < n; ++i) header.push_back(label_key(m.level, i));
  header.push_back("(none)");
  header.push_back("contains %");
  cells.push_back(header);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::string> line = {label_key(m.level, i)};
    for (Eigen::Index k = 0; k < n; ++k) line.push_back(std::to_string(m.counts(i, k)));
    line.push_back(std::to_string(m.primary_only(i)));
    line.push_back(fixed2(m.containing_percent(i)));
    cells.push_back(std::move(line));
  }
  return render_grid(cells) + "toxic messages: " + std::to_string(m.toxic_total) + '\n';
}

std::string render_high_low(const HighLowReport& r) {
  std::ostringstream out;
  out << "split: mean of per-stream toxic ratios (ties high), threshold "
      << fixed2(100.0 * r.threshold) << "%; high " << r.high_streams << " / low "
      << r.low_streams << " streams; " << r.excluded_streams
      << " streams without toxic messages; alpha " << r.alpha << '\n';
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Subclass", "High", "Low", "Route", "Result", "Significant"});
  for (const auto& row : r.rows) {
    cells.push_back({std::string(display_name(row.subclass)), fixed2(100.0 * row.mean_high),
                     fixed2(100.0 * row.mean_low), row.route, stats::format_test(row.test),
                     row.significant ? "yes" : "no"});
  }
  out << render_grid(cells);
  return out.str();
}

namespace {

std::string p_text(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

std::string stat_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_pairwise(const PairwiseReport& r) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Unit A", "Unit B", "n A", "n B", "PERMANOVA F", "p", "PERMDISP F", "p",
                   "Dispersion caveat"});
  for (const auto& row : r.rows) {
    cells.push_back({row.unit_a, row.unit_b, std::to_string(row.streams_a),
                     std::to_string(row.streams_b), stat_text(row.permanova.statistic),
                     p_text(row.permanova.p_value), stat_text(row.permdisp.statistic),
                     p_text(row.permdisp.p_value), row.dispersion_caveat ? "yes" : "no"});
  }
  return render_grid(cells) + std::to_string(r.excluded_streams) +
         " streams without toxic messages excluded\n";
}

std::string render_agreement(const AgreementReport& r) {
  std::ostringstream out;
  out << "binary labels\n";
  for (const auto& k : r.model_vs_human) {
    out << "  model vs " << k.rater << ": " << optional_fixed2(k.kappa) << '\n';
  }
  out << "  mean model vs human: " << optional_fixed2(r.mean_model_vs_human) << '\n';
  for (const auto& k : r.inter_human) {
    out << "  " << k.rater_a << " vs " << k.rater_b << ": " << optional_fixed2(k.kappa) << '\n';
  }
  out << "  mean inter-human: " << optional_fixed2(r.mean_inter_human) << '\n';
  out << "subclass labels (toxic subset)\n";
  for (const auto& k : r.subclass_model_vs_human) {
    out << "  model vs " << k.rater << ": " << optional_fixed2(k.kappa) << '\n';
  }
  out << "  mean model vs human: " << optional_fixed2(r.mean_subclass_model_vs_human) << '\n';
  out << "  mean inter-human: " << optional_fixed2(r.mean_subclass_inter_human) << '\n';
  if (!r.subclass_disagreements.empty()) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"  model", "human", "count", "share %"});
    for (const auto& c : r.subclass_disagreements) {
      cells.push_back({"  " + c.model_label, c.human_label, std::to_string(c.count),
                       fixed2(100.0 * c.share)});
    }
    out << render_grid(cells);
  }
  return out.str();
}

std::string render_f1(const F1Report& r) {
  std::ostringstream out;
  out << "tp " << r.tp << "  fp " << r.fp << "  fn " << r.fn << "  tn " << r.tn << "  invalid "
      << r.invalid << '\n'
      << "precision " << fixed2(100.0 * r.precision) << "%  recall " << fixed2(100.0 * r.recall)
      << "%  F1 " << fixed2(100.0 * r.f1) << "%\n";
  return out.str();
}

}  // namespace chattox::analysis
