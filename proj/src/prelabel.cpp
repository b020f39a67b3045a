#include "chattox/prelabel.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>

#include "chattox/error.hpp"

namespace chattox {

PreLabelRuleSet PreLabelRuleSet::defaults() {
  PreLabelRuleSet rules;
  rules.allowlist = {"hi", "yes", "gg", "lol", "hello", "no", "gl"};
  rules.bot_users = {"Nightbot", "StreamElements"};
  return rules;
}

std::string fold_message(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  auto first = std::find_if_not(text.begin(), text.end(), is_space);
  auto last = std::find_if_not(text.rbegin(), std::make_reverse_iterator(first), is_space).base();
  std::string out(first, last);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::pair<std::string, std::size_t>> top_frequent_messages(const Corpus& corpus,
                                                                       std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "top_frequent_messages: n must be >= 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& stream : corpus.streams) {
    for (const auto& m : stream.messages) ++counts[fold_message(m.text)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  auto by_rank = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t keep = std::min(n, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), by_rank);
  ranked.resize(keep);
  return ranked;
}

PreLabel prelabel_of(const ChatMessage& message, const PreLabelRuleSet& rules) {
  // Sender rule first: a bot repeating an allowlisted phrase is still a bot message.
  if (rules.bot_users.contains(message.user)) return PreLabel::BotMessage;
  if (rules.allowlist.contains(fold_message(message.text))) return PreLabel::AllowlistedNonToxic;
  return PreLabel::NeedsClassification;
}

PreLabelAssignment apply_prelabels(const Corpus& corpus, const PreLabelRuleSet& rules) {
  PreLabelAssignment out;
  out.by_stream.reserve(corpus.streams.size());
  for (const auto& stream : corpus.streams) {
    auto& labels = out.by_stream.emplace_back();
    labels.reserve(stream.messages.size());
    for (const auto& m : stream.messages) {
      const PreLabel p = prelabel_of(m, rules);
      switch (p) {
        case PreLabel::AllowlistedNonToxic: ++out.allowlisted; break;
        case PreLabel::BotMessage: ++out.bots; break;
        case PreLabel::NeedsClassification: ++out.needs_classification; break;
      }
      labels.push_back(p);
    }
  }
  return out;
}

std::vector<std::string> read_rule_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    auto end = line.find_last_not_of(" \t");
    entries.push_back(line.substr(start, end - start + 1));
  }
  return entries;
}

}  // namespace chattox
