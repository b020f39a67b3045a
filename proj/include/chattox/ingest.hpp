#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chattox {

/// The four genres that take part in genre-level comparisons.
enum class Genre { MOBA, MPShooter, SPShooter, SportsGames };

inline constexpr Genre kAllGenres[] = {Genre::MOBA, Genre::MPShooter, Genre::SPShooter,
                                       Genre::SportsGames};

std::string_view canonical_string(Genre g);
std::string_view display_name(Genre g);
std::optional<Genre> parse_genre(std::string_view text);

struct StreamMeta {
  std::string stream_id;
  std::string streamer;
  std::string game;
  std::optional<Genre> genre;
  std::string started_at;  // ISO-8601 UTC, empty when unknown
  double duration_s = 0.0;
};

/// Fields a manifest entry may force onto the parsed metadata.
struct StreamMetaHint {
  std::optional<std::string> stream_id;
  std::optional<std::string> streamer;
  std::optional<std::string> game;
  std::optional<Genre> genre;
  std::optional<std::string> started_at;
  std::optional<double> duration_s;
};

struct ChatMessage {
  std::string stream_id;
  std::size_t seq = 0;
  double offset_s = 0.0;
  std::string user;
  std::string text;
  std::string message_id;
};

/// First 16 hex chars of SHA-256("stream_id|seq").
std::string make_message_id(std::string_view stream_id, std::size_t seq);

/// Game name -> genre lookup. Built-in entries cover the selected games;
/// overrides may add games or map a game to no genre.
class GenreTable {
 public:
  GenreTable();

  std::optional<Genre> genre_of(const std::string& game) const;
  void set(const std::string& game, std::optional<Genre> genre);

 private:
  std::map<std::string, std::optional<Genre>> entries_;
};

std::optional<Genre> genre_of(const std::string& game);

struct ParseOptions {
  /// Throw MissingField instead of skipping comments that lack an offset or body.
  bool strict = false;
};

struct ParsedDump {
  StreamMeta meta;
  std::vector<ChatMessage> messages;
  std::size_t skipped_comments = 0;  // malformed comments skipped in lenient mode
  std::size_t empty_comments = 0;
};

/// Parses a TwitchDownloader-style chat JSON export.
ParsedDump parse_chat_dump(std::string_view raw, const StreamMetaHint& hint = {},
                           const ParseOptions& options = {},
                           const GenreTable& genres = GenreTable{});

struct Stream {
  StreamMeta meta;
  std::vector<ChatMessage> messages;
};

struct CorpusSummary {
  std::size_t streams = 0;
  std::size_t messages = 0;
  double hours = 0.0;
  std::size_t skipped_comments = 0;
};

struct Corpus {
  std::vector<Stream> streams;
  std::size_t skipped_comments = 0;

  std::size_t message_count() const;
  CorpusSummary summary() const;
  /// Index of the stream with this id, or nullopt.
  std::optional<std::size_t> find_stream(std::string_view stream_id) const;
};

/// Appends a stream, rejecting duplicate stream ids.
void add_stream(Corpus& corpus, Stream stream);

struct ManifestEntry {
  std::filesystem::path path;
  StreamMetaHint hint;
};

/// Manifest document: {"dumps": [{"path", "streamer", "game", "stream_id"?, "genre"?}]}.
/// Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

Corpus load_corpus(const std::filesystem::path& manifest, const ParseOptions& options = {},
                   const GenreTable& genres = GenreTable{});

/// Normalized corpus on disk: streams.jsonl, messages.jsonl and summary.json in `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus read_corpus(const std::filesystem::path& dir);

/// Digest over the normalized corpus files.
std::string corpus_digest(const std::filesystem::path& dir);

}  // namespace chattox
