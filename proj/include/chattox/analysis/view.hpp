#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chattox/ingest.hpp"
#include "chattox/label_store.hpp"

namespace chattox::analysis {

enum class GroupBy { All, Game, Genre, Stream };

std::string_view to_string(GroupBy g);
std::optional<GroupBy> parse_group_by(std::string_view text);

struct LabeledMessage {
  std::size_t stream = 0;
  std::size_t index = 0;  // position within the stream
  LabelStatus status = LabelStatus::NonToxic;
  std::optional<Subclass> primary;
  std::optional<Subclass> secondary;
};

/// Corpus messages joined with their labels. Holds a reference to the
/// corpus, which must outlive the view.
class LabeledCorpusView {
 public:
  /// Error(StageMissingInput) if any corpus message has no label.
  LabeledCorpusView(const Corpus& corpus, std::span<const ToxicityLabel> labels);

  const Corpus& corpus() const { return *corpus_; }
  std::span<const LabeledMessage> messages() const { return messages_; }
  /// Label records that matched no corpus message.
  std::size_t orphan_labels() const { return orphan_labels_; }

  /// Group key of a stream, or nullopt when the stream has no such group
  /// (a game outside the four genres under GroupBy::Genre).
  std::optional<std::string> group_key(std::size_t stream, GroupBy by) const;

  const ChatMessage& message(const LabeledMessage& m) const {
    return corpus_->streams[m.stream].messages[m.index];
  }

 private:
  const Corpus* corpus_;
  std::vector<LabeledMessage> messages_;
  std::size_t orphan_labels_ = 0;
};

}  // namespace chattox::analysis
