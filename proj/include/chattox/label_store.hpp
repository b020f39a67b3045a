#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chattox/taxonomy.hpp"

namespace chattox {

enum class LabelStatus { PreNonToxic, Bot, NonToxic, Toxic, Invalid };

inline constexpr LabelStatus kAllStatuses[] = {LabelStatus::PreNonToxic, LabelStatus::Bot,
                                               LabelStatus::NonToxic, LabelStatus::Toxic,
                                               LabelStatus::Invalid};

std::string_view to_string(LabelStatus status);
std::optional<LabelStatus> parse_status(std::string_view text);

struct ToxicityLabel {
  std::string message_id;
  LabelStatus status = LabelStatus::NonToxic;
  std::optional<Subclass> primary;
  std::optional<Subclass> secondary;
  std::string backend_id;
  std::string response_digest;

  /// Subclasses only on Toxic; secondary implies primary; primary != secondary.
  bool valid() const;
  bool operator==(const ToxicityLabel&) const = default;
};

std::string serialize_label(const ToxicityLabel& label);
ToxicityLabel deserialize_label(std::string_view line);

/// Append-only JSON-lines log with one final record per message id.
///
/// Opening an existing store replays it. A torn final line (no trailing
/// newline, left by a crash mid-write) is discarded and truncated; any other
/// unreadable line is Error(StoreCorrupt). Appends are serialized and flushed
/// line by line, so every record that returned from append() survives a crash.
class LabelStore {
 public:
  explicit LabelStore(std::filesystem::path path);
  ~LabelStore();
  LabelStore(const LabelStore&) = delete;
  LabelStore& operator=(const LabelStore&) = delete;

  /// False (and no write) when a record for this message id already exists.
  bool append(const ToxicityLabel& label);

  bool contains(const std::string& message_id) const;
  std::optional<ToxicityLabel> find(const std::string& message_id) const;
  std::size_t size() const;
  /// Records in commit order.
  std::vector<ToxicityLabel> records() const;

  /// Bytes dropped from a torn tail when the store was opened.
  std::size_t recovered_tail_bytes() const { return recovered_tail_bytes_; }
  const std::filesystem::path& path() const { return path_; }

  /// fsync the file.
  void sync();

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  mutable std::mutex mu_;
  std::vector<ToxicityLabel> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t recovered_tail_bytes_ = 0;
};

/// Reads a store without opening it for writing.
std::vector<ToxicityLabel> read_label_store(const std::filesystem::path& path);

}  // namespace chattox
