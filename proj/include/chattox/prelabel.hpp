#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chattox/ingest.hpp"

namespace chattox {

enum class PreLabel { AllowlistedNonToxic, BotMessage, NeedsClassification };

/// Allowlist entries are compared against case-folded, trimmed message text;
/// bot names are compared exactly against the sender.
struct PreLabelRuleSet {
  std::set<std::string> allowlist;
  std::set<std::string> bot_users;

  static PreLabelRuleSet defaults();
};

/// ASCII lowercase with surrounding whitespace removed.
std::string fold_message(std::string_view text);

std::vector<std::pair<std::string, std::size_t>> top_frequent_messages(const Corpus& corpus,
                                                                       std::size_t n);

PreLabel prelabel_of(const ChatMessage& message, const PreLabelRuleSet& rules);

struct PreLabelAssignment {
  /// Parallel to corpus.streams[i].messages.
  std::vector<std::vector<PreLabel>> by_stream;
  std::size_t allowlisted = 0;
  std::size_t bots = 0;
  std::size_t needs_classification = 0;

  PreLabel at(std::size_t stream, std::size_t message) const {
    return by_stream[stream][message];
  }
  std::size_t total() const { return allowlisted + bots + needs_classification; }
};

PreLabelAssignment apply_prelabels(const Corpus& corpus, const PreLabelRuleSet& rules);

/// One entry per line; blank lines and lines starting with '#' are ignored.
std::vector<std::string> read_rule_file(const std::filesystem::path& path);

}  // namespace chattox
