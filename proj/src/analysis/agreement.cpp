#include "chattox/analysis/agreement.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "chattox/error.hpp"
#include "chattox/stats/kappa.hpp"
#include "chattox/stats/rng.hpp"

namespace chattox::analysis {

namespace {

std::string tsv_cell(std::string_view text) {
  std::string out(text);
  std::replace_if(out.begin(), out.end(),
                  [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cells.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cells;
}

struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;

  const std::string& cell(std::size_t row, const std::string& column) const {
    static const std::string kEmpty;
    auto it = columns.find(column);
    if (it == columns.end() || it->second >= rows[row].size()) return kEmpty;
    return rows[row][it->second];
  }
};

Table read_tsv(const std::filesystem::path& path, std::initializer_list<const char*> required) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  Table t;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      const auto names = split_tabs(line);
      for (std::size_t i = 0; i < names.size(); ++i) t.columns[names[i]] = i;
      header = false;
      continue;
    }
    if (line.empty()) continue;
    t.rows.push_back(split_tabs(line));
  }
  for (const char* column : required) {
    if (!t.columns.contains(column)) {
      throw Error(ErrorCode::RowMismatch, path.string() + ": missing column '" + column + "'");
    }
  }
  return t;
}

std::optional<bool> parse_binary_label(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (text == "toxic" || text == "yes" || text == "1" || text == "true") return true;
  if (text == "nontoxic" || text == "non-toxic" || text == "non_toxic" || text == "no" ||
      text == "0" || text == "false") {
    return false;
  }
  return std::nullopt;
}

std::optional<Subclass> subclass_cell(const std::string& text, const std::string& where) {
  if (text.empty() || text == "none") return std::nullopt;
  auto s = parse_subclass(text);
  if (!s) throw Error(ErrorCode::InvalidArgument, where + ": unknown subclass '" + text + "'");
  return s;
}

}  // namespace

SampleBundle agreement_sample(const LabeledCorpusView& view, std::size_t n_toxic,
                              std::size_t n_nontoxic, std::uint64_t seed, double window_s,
                              std::size_t cap) {
  std::vector<const LabeledMessage*> toxic;
  std::vector<const LabeledMessage*> nontoxic;
  for (const auto& m : view.messages()) {
    if (m.status == LabelStatus::Toxic) toxic.push_back(&m);
    if (m.status == LabelStatus::NonToxic) nontoxic.push_back(&m);
  }
  if (toxic.size() < n_toxic || nontoxic.size() < n_nontoxic) {
    throw Error(ErrorCode::InsufficientClass,
                "requested " + std::to_string(n_toxic) + " toxic / " +
                    std::to_string(n_nontoxic) + " non-toxic, available " +
                    std::to_string(toxic.size()) + " / " + std::to_string(nontoxic.size()));
  }
  stats::CounterRng(seed, 0).shuffle(std::span(toxic));
  stats::CounterRng(seed, 1).shuffle(std::span(nontoxic));
  std::vector<const LabeledMessage*> picked(toxic.begin(),
                                            toxic.begin() + static_cast<std::ptrdiff_t>(n_toxic));
  picked.insert(picked.end(), nontoxic.begin(),
                nontoxic.begin() + static_cast<std::ptrdiff_t>(n_nontoxic));
  stats::CounterRng(seed, 2).shuffle(std::span(picked));

  SampleBundle bundle;
  bundle.seed = seed;
  const int width = std::max<int>(3, static_cast<int>(std::to_string(picked.size()).size()));
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const LabeledMessage& m = *picked[i];
    const auto& stream = view.corpus().streams[m.stream].messages;
    const Context ctx = build_context(stream, m.index, window_s, cap);
    std::string context;
    for (const auto& line : ctx.lines) {
      if (!context.empty()) context += " | ";
      context += line.user + ": " + line.text;
    }
    std::string id = std::to_string(i + 1);
    id.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0');

    SampleRow row;
    row.sample_id = "s" + id;
    row.message_id = stream[m.index].message_id;
    row.context = std::move(context);
    row.text = stream[m.index].text;
    row.toxic = m.status == LabelStatus::Toxic;
    row.primary = m.primary;
    row.secondary = m.secondary;
    bundle.rows.push_back(std::move(row));
  }
  return bundle;
}

void write_rater_file(const SampleBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotReadable, "cannot write " + path.string());
  out << "sample_id\tcontext\ttext\tlabel\tsubclass\n";
  for (const auto& r : bundle.rows) {
    out << r.sample_id << '\t' << tsv_cell(r.context) << '\t' << tsv_cell(r.text) << "\t\t\n";
  }
}

void write_answer_key(const SampleBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotReadable, "cannot write " + path.string());
  out << "sample_id\tmessage_id\tlabel\tprimary\tsecondary\n";
  for (const auto& r : bundle.rows) {
    out << r.sample_id << '\t' << r.message_id << '\t' << (r.toxic ? "toxic" : "nontoxic")
        << '\t' << (r.primary ? canonical_string(*r.primary) : "") << '\t'
        << (r.secondary ? canonical_string(*r.secondary) : "") << '\n';
  }
}

std::vector<KeyRow> read_answer_key(const std::filesystem::path& path) {
  const Table t = read_tsv(path, {"sample_id", "label"});
  std::vector<KeyRow> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string where = path.string() + " row " + std::to_string(i + 1);
    KeyRow r;
    r.sample_id = t.cell(i, "sample_id");
    auto label = parse_binary_label(t.cell(i, "label"));
    if (!label) throw Error(ErrorCode::RowMismatch, where + ": unreadable label");
    r.toxic = *label;
    r.primary = subclass_cell(t.cell(i, "primary"), where);
    rows.push_back(std::move(r));
  }
  return rows;
}

RaterSheet read_rater_file(const std::filesystem::path& path) {
  const Table t = read_tsv(path, {"sample_id", "label"});
  RaterSheet sheet;
  sheet.rater = path.stem().string();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string where = path.string() + " row " + std::to_string(i + 1);
    RaterRow r;
    r.sample_id = t.cell(i, "sample_id");
    auto label = parse_binary_label(t.cell(i, "label"));
    if (!label) throw Error(ErrorCode::RowMismatch, where + ": missing or unreadable label");
    r.toxic = *label;
    r.subclass = subclass_cell(t.cell(i, "subclass"), where);
    sheet.rows.push_back(std::move(r));
  }
  return sheet;
}

std::optional<double> mean_of(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

namespace {

template <typename Label>
std::optional<double> kappa_or_none(const std::vector<Label>& a, const std::vector<Label>& b) {
  if (a.empty()) return std::nullopt;
  try {
    return stats::cohen_kappa(a, b).kappa;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateAgreement) throw;
    return std::nullopt;
  }
}

template <typename Row>
std::optional<double> mean_kappa(const std::vector<Row>& rows) {
  std::vector<std::optional<double>> values;
  for (const auto& r : rows) values.push_back(r.kappa);
  return mean_of(values);
}

}  // namespace

AgreementReport agreement_score(std::span<const KeyRow> key, std::span<const RaterSheet> raters) {
  std::unordered_map<std::string, std::size_t> key_index;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (!key_index.emplace(key[i].sample_id, i).second) {
      throw Error(ErrorCode::RowMismatch, "duplicate sample id in key: " + key[i].sample_id);
    }
  }
  // aligned[r][i]: rater r's row for key row i.
  std::vector<std::vector<const RaterRow*>> aligned(raters.size(),
                                                    std::vector<const RaterRow*>(key.size()));
  for (std::size_t r = 0; r < raters.size(); ++r) {
    if (raters[r].rows.size() != key.size()) {
      throw Error(ErrorCode::RowMismatch, raters[r].rater + " has " +
                                              std::to_string(raters[r].rows.size()) +
                                              " rows, key has " + std::to_string(key.size()));
    }
    for (const auto& row : raters[r].rows) {
      auto it = key_index.find(row.sample_id);
      if (it == key_index.end() || aligned[r][it->second] != nullptr) {
        throw Error(ErrorCode::RowMismatch,
                    raters[r].rater + ": unexpected or repeated sample id " + row.sample_id);
      }
      aligned[r][it->second] = &row;
    }
  }

  AgreementReport report;
  std::map<std::pair<Subclass, Subclass>, std::size_t> confusion;
  std::size_t disagreements = 0;

  for (std::size_t r = 0; r < raters.size(); ++r) {
    std::vector<int> model;
    std::vector<int> human;
    std::vector<Subclass> model_sub;
    std::vector<Subclass> human_sub;
    for (std::size_t i = 0; i < key.size(); ++i) {
      model.push_back(key[i].toxic);
      human.push_back(aligned[r][i]->toxic);
      if (key[i].toxic && key[i].primary && aligned[r][i]->subclass) {
        model_sub.push_back(*key[i].primary);
        human_sub.push_back(*aligned[r][i]->subclass);
        if (model_sub.back() != human_sub.back()) {
          ++confusion[{model_sub.back(), human_sub.back()}];
          ++disagreements;
        }
      }
    }
    report.model_vs_human.push_back({raters[r].rater, kappa_or_none(model, human), model.size()});
    report.subclass_model_vs_human.push_back(
        {raters[r].rater, kappa_or_none(model_sub, human_sub), model_sub.size()});
  }

  for (std::size_t a = 0; a < raters.size(); ++a) {
    for (std::size_t b = a + 1; b < raters.size(); ++b) {
      std::vector<int> la;
      std::vector<int> lb;
      std::vector<Subclass> sa;
      std::vector<Subclass> sb;
      for (std::size_t i = 0; i < key.size(); ++i) {
        la.push_back(aligned[a][i]->toxic);
        lb.push_back(aligned[b][i]->toxic);
        if (key[i].toxic && aligned[a][i]->subclass && aligned[b][i]->subclass) {
          sa.push_back(*aligned[a][i]->subclass);
          sb.push_back(*aligned[b][i]->subclass);
        }
      }
      report.inter_human.push_back(
          {raters[a].rater, raters[b].rater, kappa_or_none(la, lb), la.size()});
      report.subclass_inter_human.push_back(
          {raters[a].rater, raters[b].rater, kappa_or_none(sa, sb), sa.size()});
    }
  }

  report.mean_model_vs_human = mean_kappa(report.model_vs_human);
  report.mean_inter_human = mean_kappa(report.inter_human);
  report.mean_subclass_model_vs_human = mean_kappa(report.subclass_model_vs_human);
  report.mean_subclass_inter_human = mean_kappa(report.subclass_inter_human);

  for (const auto& [pair, count] : confusion) {
    report.subclass_disagreements.push_back(
        {std::string(canonical_string(pair.first)), std::string(canonical_string(pair.second)),
         count, static_cast<double>(count) / static_cast<double>(disagreements)});
  }
  std::stable_sort(report.subclass_disagreements.begin(), report.subclass_disagreements.end(),
                   [](const auto& x, const auto& y) { return x.count > y.count; });
  return report;
}

}  // namespace chattox::analysis
