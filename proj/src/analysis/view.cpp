#include "chattox/analysis/view.hpp"

#include <unordered_map>

#include "chattox/error.hpp"

namespace chattox::analysis {

std::string_view to_string(GroupBy g) {
  switch (g) {
    case GroupBy::All: return "all";
    case GroupBy::Game: return "game";
    case GroupBy::Genre: return "genre";
    case GroupBy::Stream: return "stream";
  }
  return "";
}

std::optional<GroupBy> parse_group_by(std::string_view text) {
  for (GroupBy g : {GroupBy::All, GroupBy::Game, GroupBy::Genre, GroupBy::Stream}) {
    if (to_string(g) == text) return g;
  }
  return std::nullopt;
}

LabeledCorpusView::LabeledCorpusView(const Corpus& corpus, std::span<const ToxicityLabel> labels)
    : corpus_(&corpus) {
  std::unordered_map<std::string_view, const ToxicityLabel*> by_id;
  by_id.reserve(labels.size());
  for (const auto& l : labels) by_id.emplace(l.message_id, &l);

  std::size_t matched = 0;
  std::size_t missing = 0;
  messages_.reserve(corpus.message_count());
  for (std::size_t s = 0; s < corpus.streams.size(); ++s) {
    const auto& msgs = corpus.streams[s].messages;
    for (std::size_t i = 0; i < msgs.size(); ++i) {
      auto it = by_id.find(msgs[i].message_id);
      if (it == by_id.end()) {
        ++missing;
        continue;
      }
      ++matched;
      const ToxicityLabel& l = *it->second;
      messages_.push_back({s, i, l.status, l.primary, l.secondary});
    }
  }
  if (missing > 0) {
    throw Error(ErrorCode::StageMissingInput,
                std::to_string(missing) + " corpus messages have no label; run classify first");
  }
  orphan_labels_ = labels.size() - matched;
}

std::optional<std::string> LabeledCorpusView::group_key(std::size_t stream, GroupBy by) const {
  const StreamMeta& meta = corpus_->streams[stream].meta;
  switch (by) {
    case GroupBy::All: return std::string("all");
    case GroupBy::Game: return meta.game;
    case GroupBy::Stream: return meta.stream_id;
    case GroupBy::Genre:
      if (!meta.genre) return std::nullopt;
      return std::string(display_name(*meta.genre));
  }
  return std::nullopt;
}

}  // namespace chattox::analysis
