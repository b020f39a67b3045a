#include "chattox/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "chattox/digest.hpp"
#include "chattox/error.hpp"

namespace chattox {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view canonical_string(Genre g) {
  switch (g) {
    case Genre::MOBA: return "moba";
    case Genre::MPShooter: return "mp_shooter";
    case Genre::SPShooter: return "sp_shooter";
    case Genre::SportsGames: return "sports_games";
  }
  return "";
}

std::string_view display_name(Genre g) {
  switch (g) {
    case Genre::MOBA: return "MOBA";
    case Genre::MPShooter: return "MP Shooter";
    case Genre::SPShooter: return "SP Shooter";
    case Genre::SportsGames: return "Sports Games";
  }
  return "";
}

std::optional<Genre> parse_genre(std::string_view text) {
  for (Genre g : kAllGenres) {
    if (text == canonical_string(g) || text == display_name(g)) return g;
  }
  return std::nullopt;
}

std::string make_message_id(std::string_view stream_id, std::size_t seq) {
  std::string key(stream_id);
  key += '|';
  key += std::to_string(seq);
  return short_digest(key, 16);
}

GenreTable::GenreTable() {
  entries_ = {
      {"League of Legends", Genre::MOBA},
      {"Dota 2", Genre::MOBA},
      {"Counter-Strike 2", Genre::MPShooter},
      {"Counter-Strike", Genre::MPShooter},
      {"Valorant", Genre::MPShooter},
      {"VALORANT", Genre::MPShooter},
      {"Cyberpunk 2077", Genre::SPShooter},
      {"Red Dead Redemption 2", Genre::SPShooter},
      {"Red Dead Redemption II", Genre::SPShooter},
      {"FIFA/FC 26", Genre::SportsGames},
      {"EA Sports FC 26", Genre::SportsGames},
      {"Trackmania", Genre::SportsGames},
      {"Path of Exile", std::nullopt},
      {"Minecraft", std::nullopt},
      {"Dead by Daylight", std::nullopt},
      {"Hearthstone", std::nullopt},
      {"Dispatch", std::nullopt},
      {"Plants vs Zombies", std::nullopt},
      {"Plants vs. Zombies", std::nullopt},
  };
}

std::optional<Genre> GenreTable::genre_of(const std::string& game) const {
  auto it = entries_.find(game);
  return it == entries_.end() ? std::nullopt : it->second;
}

void GenreTable::set(const std::string& game, std::optional<Genre> genre) {
  entries_[game] = genre;
}

std::optional<Genre> genre_of(const std::string& game) {
  static const GenreTable table;
  return table.genre_of(game);
}

namespace {

std::optional<std::string> id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  return std::nullopt;
}

std::optional<double> number_at(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

std::optional<std::string> string_at(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

void merge_hint(StreamMeta& meta, const StreamMetaHint& hint) {
  if (hint.stream_id) meta.stream_id = *hint.stream_id;
  if (hint.streamer) meta.streamer = *hint.streamer;
  if (hint.game) meta.game = *hint.game;
  if (hint.started_at) meta.started_at = *hint.started_at;
  if (hint.duration_s) meta.duration_s = *hint.duration_s;
}

struct RawComment {
  double offset;
  std::string user;
  std::string body;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ParsedDump parse_chat_dump(std::string_view raw, const StreamMetaHint& hint,
                           const ParseOptions& options, const GenreTable& genres) {
  json doc;
  try {
    doc = json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedDump,
                "unparseable document at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedDump, "top level is not an object");
  auto comments_it = doc.find("comments");
  if (comments_it == doc.end() || !comments_it->is_array()) {
    throw Error(ErrorCode::MalformedDump, "missing 'comments' array");
  }

  ParsedDump out;
  StreamMeta& meta = out.meta;
  if (auto s = doc.find("streamer"); s != doc.end() && s->is_object()) {
    meta.streamer = string_at(*s, "name").value_or("");
  }
  std::optional<double> duration;
  if (auto v = doc.find("video"); v != doc.end() && v->is_object()) {
    if (auto id = v->find("id"); id != v->end()) meta.stream_id = id_string(*id).value_or("");
    meta.game = string_at(*v, "game").value_or("");
    meta.started_at = string_at(*v, "created_at").value_or("");
    duration = number_at(*v, "length");
    if (!duration) {
      auto start = number_at(*v, "start");
      auto end = number_at(*v, "end");
      if (start && end) duration = *end - *start;
    }
  }

  std::vector<RawComment> comments;
  const json& arr = *comments_it;
  comments.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& c = arr[i];
    std::optional<double> offset;
    std::optional<std::string> body;
    std::string user;
    if (c.is_object()) {
      offset = number_at(c, "content_offset_seconds");
      if (auto m = c.find("message"); m != c.end() && m->is_object()) body = string_at(*m, "body");
      if (auto u = c.find("commenter"); u != c.end() && u->is_object()) {
        user = string_at(*u, "display_name").value_or(string_at(*u, "name").value_or(""));
      }
    }
    if (!offset || !body || *offset < 0.0) {
      if (options.strict) {
        throw Error(ErrorCode::MissingField,
                    "comment " + std::to_string(i) + " lacks a valid offset or body");
      }
      ++out.skipped_comments;
      continue;
    }
    if (body->empty()) {
      ++out.empty_comments;
      continue;
    }
    comments.push_back({*offset, std::move(user), std::move(*body)});
  }

  merge_hint(meta, hint);
  if (meta.stream_id.empty()) meta.stream_id = short_digest(raw, 16);
  meta.genre = hint.genre ? hint.genre : genres.genre_of(meta.game);

  std::stable_sort(comments.begin(), comments.end(),
                   [](const RawComment& a, const RawComment& b) { return a.offset < b.offset; });
  if (!hint.duration_s) {
    meta.duration_s = duration.value_or(comments.empty() ? 0.0 : comments.back().offset);
  }
  meta.duration_s = std::max(0.0, meta.duration_s);

  out.messages.reserve(comments.size());
  for (std::size_t seq = 0; seq < comments.size(); ++seq) {
    ChatMessage m;
    m.stream_id = meta.stream_id;
    m.seq = seq;
    m.offset_s = comments[seq].offset;
    m.user = std::move(comments[seq].user);
    m.text = std::move(comments[seq].body);
    m.message_id = make_message_id(meta.stream_id, seq);
    out.messages.push_back(std::move(m));
  }
  return out;
}

std::size_t Corpus::message_count() const {
  std::size_t n = 0;
  for (const auto& s : streams) n += s.messages.size();
  return n;
}

CorpusSummary Corpus::summary() const {
  CorpusSummary s;
  s.streams = streams.size();
  s.messages = message_count();
  double seconds = 0.0;
  for (const auto& st : streams) seconds += st.meta.duration_s;
  s.hours = seconds / 3600.0;
  s.skipped_comments = skipped_comments;
  return s;
}

std::optional<std::size_t> Corpus::find_stream(std::string_view stream_id) const {
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i].meta.stream_id == stream_id) return i;
  }
  return std::nullopt;
}

void add_stream(Corpus& corpus, Stream stream) {
  if (corpus.find_stream(stream.meta.stream_id)) {
    throw Error(ErrorCode::DuplicateStream, "stream '" + stream.meta.stream_id + "'");
  }
  corpus.streams.push_back(std::move(stream));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  const std::string text = read_file(manifest);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedDump, manifest.string() + ": unparseable manifest at byte " +
                                              std::to_string(e.byte));
  }
  auto dumps = doc.find("dumps");
  if (!doc.is_object() || dumps == doc.end() || !dumps->is_array()) {
    throw Error(ErrorCode::MalformedDump, manifest.string() + ": expected {\"dumps\": [...]}");
  }
  const auto base = manifest.parent_path();
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < dumps->size(); ++i) {
    const json& e = (*dumps)[i];
    auto path = e.is_object() ? string_at(e, "path") : std::nullopt;
    if (!path) {
      throw Error(ErrorCode::MissingField, manifest.string() + ": entry " + std::to_string(i) +
                                               " has no 'path'");
    }
    ManifestEntry entry;
    entry.path = std::filesystem::path(*path).is_absolute() ? std::filesystem::path(*path)
                                                            : base / *path;
    entry.hint.stream_id = string_at(e, "stream_id");
    entry.hint.streamer = string_at(e, "streamer");
    entry.hint.game = string_at(e, "game");
    if (auto g = string_at(e, "genre")) entry.hint.genre = parse_genre(*g);
    entries.push_back(std::move(entry));
  }
  return entries;
}

Corpus load_corpus(const std::filesystem::path& manifest, const ParseOptions& options,
                   const GenreTable& genres) {
  Corpus corpus;
  for (const auto& entry : read_manifest(manifest)) {
    ParsedDump dump = parse_chat_dump(read_file(entry.path), entry.hint, options, genres);
    corpus.skipped_comments += dump.skipped_comments;
    add_stream(corpus, Stream{std::move(dump.meta), std::move(dump.messages)});
  }
  return corpus;
}

namespace {

ordered_json stream_record(const StreamMeta& m) {
  ordered_json j;
  j["stream_id"] = m.stream_id;
  j["streamer"] = m.streamer;
  j["game"] = m.game;
  j["genre"] = m.genre ? ordered_json(canonical_string(*m.genre)) : ordered_json(nullptr);
  j["started_at"] = m.started_at;
  j["duration_s"] = m.duration_s;
  return j;
}

ordered_json message_record(const ChatMessage& m) {
  ordered_json j;
  j["stream_id"] = m.stream_id;
  j["seq"] = m.seq;
  j["offset_s"] = m.offset_s;
  j["user"] = m.user;
  j["text"] = m.text;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotReadable, "cannot write " + path.string());
  out << text;
}

}  // namespace

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string streams;
  std::string messages;
  for (const auto& s : corpus.streams) {
    streams += stream_record(s.meta).dump(-1, ' ', false, json::error_handler_t::replace);
    streams += '\n';
    for (const auto& m : s.messages) {
      messages += message_record(m).dump(-1, ' ', false, json::error_handler_t::replace);
      messages += '\n';
    }
  }
  write_text(dir / "streams.jsonl", streams);
  write_text(dir / "messages.jsonl", messages);

  const CorpusSummary sum = corpus.summary();
  ordered_json summary;
  summary["streams"] = sum.streams;
  summary["messages"] = sum.messages;
  summary["hours"] = sum.hours;
  summary["skipped_comments"] = sum.skipped_comments;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

Corpus read_corpus(const std::filesystem::path& dir) {
  Corpus corpus;
  {
    std::ifstream in(dir / "streams.jsonl");
    if (!in) throw Error(ErrorCode::FileNotReadable, (dir / "streams.jsonl").string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        json j = json::parse(line);
        Stream s;
        s.meta.stream_id = j.at("stream_id").get<std::string>();
        s.meta.streamer = j.at("streamer").get<std::string>();
        s.meta.game = j.at("game").get<std::string>();
        if (!j.at("genre").is_null()) s.meta.genre = parse_genre(j["genre"].get<std::string>());
        s.meta.started_at = j.at("started_at").get<std::string>();
        s.meta.duration_s = j.at("duration_s").get<double>();
        add_stream(corpus, std::move(s));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedDump,
                    "streams.jsonl line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  std::ifstream in(dir / "messages.jsonl");
  if (!in) throw Error(ErrorCode::FileNotReadable, (dir / "messages.jsonl").string());
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> current;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ChatMessage m;
    try {
      json j = json::parse(line);
      m.stream_id = j.at("stream_id").get<std::string>();
      m.seq = j.at("seq").get<std::size_t>();
      m.offset_s = j.at("offset_s").get<double>();
      m.user = j.at("user").get<std::string>();
      m.text = j.at("text").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedDump,
                  "messages.jsonl line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!current || corpus.streams[*current].meta.stream_id != m.stream_id) {
      current = corpus.find_stream(m.stream_id);
      if (!current) {
        throw Error(ErrorCode::MalformedDump, "messages.jsonl line " + std::to_string(lineno) +
                                                  ": unknown stream '" + m.stream_id + "'");
      }
    }
    auto& msgs = corpus.streams[*current].messages;
    if (m.seq != msgs.size() || (!msgs.empty() && m.offset_s < msgs.back().offset_s)) {
      throw Error(ErrorCode::MalformedDump,
                  "messages.jsonl line " + std::to_string(lineno) + ": out-of-order message");
    }
    m.message_id = make_message_id(m.stream_id, m.seq);
    msgs.push_back(std::move(m));
  }
  if (std::ifstream summary(dir / "summary.json"); summary) {
    try {
      corpus.skipped_comments = json::parse(summary).value("skipped_comments", std::size_t{0});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedDump, "summary.json: " + std::string(e.what()));
    }
  }
  return corpus;
}

std::string corpus_digest(const std::filesystem::path& dir) {
  return sha256_hex(file_sha256_hex(dir / "streams.jsonl") +
                    file_sha256_hex(dir / "messages.jsonl"));
}

}  // namespace chattox
