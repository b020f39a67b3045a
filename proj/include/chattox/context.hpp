#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chattox/ingest.hpp"

namespace chattox {

inline constexpr double kDefaultWindowSeconds = 10.0;
inline constexpr std::size_t kDefaultContextCap = 50;

struct ContextLine {
  std::string user;
  std::string text;
  double offset_s = 0.0;
  std::size_t seq = 0;
};

/// Same-stream messages shown to the classifier ahead of the target, oldest first.
struct Context {
  std::vector<ContextLine> lines;

  bool empty() const { return lines.empty(); }
  std::size_t size() const { return lines.size(); }
};

/// Messages with offset in [t - window_s, t), keeping the `cap` most recent.
/// `stream_messages` must be in stream order.
Context build_context(std::span<const ChatMessage> stream_messages, std::size_t target_index,
                      double window_s = kDefaultWindowSeconds,
                      std::size_t cap = kDefaultContextCap);

}  // namespace chattox
