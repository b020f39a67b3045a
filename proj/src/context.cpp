#include "chattox/context.hpp"

#include <algorithm>

#include "chattox/error.hpp"

namespace chattox {

Context build_context(std::span<const ChatMessage> stream_messages, std::size_t target_index,
                      double window_s, std::size_t cap) {
  if (target_index >= stream_messages.size()) {
    throw Error(ErrorCode::InvalidArgument, "build_context: target index out of range");
  }
  const double t = stream_messages[target_index].offset_s;
  const double lower = t - window_s;

  // Walk backwards from the target; offsets are non-decreasing so we can stop early.
  std::vector<ContextLine> picked;
  for (std::size_t i = target_index; i-- > 0 && picked.size() < cap;) {
    const ChatMessage& m = stream_messages[i];
    if (m.offset_s < lower) break;
    if (m.offset_s >= t) continue;
    picked.push_back({m.user, m.text, m.offset_s, m.seq});
  }
  std::reverse(picked.begin(), picked.end());
  return Context{std::move(picked)};
}

}  // namespace chattox
