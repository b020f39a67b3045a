#include "chattox/analysis/benchmark.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "chattox/error.hpp"
#include "chattox/prompt.hpp"

namespace chattox::analysis {

namespace {

bool gold_of(const nlohmann::json& row, const std::string& where) {
  const nlohmann::json* field = nullptr;
  if (row.contains("toxic")) field = &row["toxic"];
  else if (row.contains("label")) field = &row["label"];
  if (field == nullptr) throw Error(ErrorCode::MissingField, where + ": no toxic/label field");
  if (field->is_boolean()) return field->get<bool>();
  if (field->is_number()) return field->get<double>() != 0.0;
  if (field->is_string()) {
    const auto s = field->get<std::string>();
    if (s == "toxic" || s == "1" || s == "true") return true;
    if (s == "nontoxic" || s == "non-toxic" || s == "non_toxic" || s == "0" || s == "false") {
      return false;
    }
  }
  throw Error(ErrorCode::MalformedDump, where + ": unreadable gold label");
}

}  // namespace

std::vector<BenchmarkItem> read_benchmark_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  std::vector<BenchmarkItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedDump, where + ": " + e.what());
    }
    if (!row.contains("text") || !row["text"].is_string()) {
      throw Error(ErrorCode::MissingField, where + ": no text field");
    }
    items.push_back({row["text"].get<std::string>(), gold_of(row, where)});
  }
  return items;
}

F1Report f1_benchmark(std::span<const BenchmarkItem> items, Backend& backend,
                      const RetryPolicy& retry) {
  if (items.empty()) throw Error(ErrorCode::InvalidArgument, "benchmark dataset is empty");
  F1Report r;
  const Context empty;
  for (std::size_t i = 0; i < items.size(); ++i) {
    ChatMessage target;
    target.stream_id = "benchmark";
    target.seq = i;
    target.user = "user";
    target.text = items[i].text;
    target.message_id = make_message_id(target.stream_id, i);
    const auto raw = send_with_retry(backend, render_prompt(target, empty, PromptStage::Binary), retry);
    const auto verdict = parse_binary_response(raw);
    if (verdict == BinaryVerdict::Invalid) ++r.invalid;
    const bool predicted = verdict == BinaryVerdict::Toxic;
    if (predicted && items[i].toxic) ++r.tp;
    else if (predicted) ++r.fp;
    else if (items[i].toxic) ++r.fn;
    else ++r.tn;
  }
  const auto tp = static_cast<double>(r.tp);
  if (r.tp + r.fp > 0) r.precision = tp / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = tp / static_cast<double>(r.tp + r.fn);
  if (r.tp > 0) r.f1 = 2.0 * tp / static_cast<double>(2 * r.tp + r.fp + r.fn);
  return r;
}

}  // namespace chattox::analysis
