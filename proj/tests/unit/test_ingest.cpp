#include <doctest.h>

#include <nlohmann/json.hpp>

#include "../support/tempdir.hpp"
#include "chattox/digest.hpp"
#include "chattox/error.hpp"
#include "chattox/ingest.hpp"
#include "chattox/prelabel.hpp"
#include "chattox/taxonomy.hpp"

using namespace chattox;
using chattox::testing::TempDir;
using chattox::testing::write_text;

namespace {

std::string dump(const std::string& id, const std::string& game,
                 const std::vector<std::tuple<double, std::string, std::string>>& comments) {
  nlohmann::json j;
  j["streamer"] = {{"name", "somestreamer"}, {"id", 1}};
  j["video"] = {{"id", id}, {"title", "t"}, {"game", game}, {"created_at", "2025-11-14T10:00:00Z"},
                {"length", 3600}};
  j["comments"] = nlohmann::json::array();
  for (const auto& [offset, user, body] : comments) {
    j["comments"].push_back({{"content_offset_seconds", offset},
                             {"commenter", {{"display_name", user}}},
                             {"message", {{"body", body}}}});
  }
  return j.dump();
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("taxonomy") {

TEST_CASE("eight subclasses partition into four categories 2/4/1/1") {
  std::array<int, kCategoryCount> sizes{};
  for (Subclass s : kAllSubclasses) ++sizes[index_of(category_of(s))];
  CHECK(sizes == std::array<int, 4>{2, 4, 1, 1});
  CHECK(category_of(Subclass::Bullying) == Category::Harassment);
  CHECK(category_of(Subclass::Misogyny) == Category::Discrimination);
  CHECK(category_of(Subclass::SexBasedTerms) == Category::SexualContent);
  CHECK(category_of(Subclass::Swearing) == Category::Profanity);
}

TEST_CASE("canonical strings round-trip and aliases resolve") {
  for (Subclass s : kAllSubclasses) {
    CHECK(parse_subclass(canonical_string(s)) == s);
    CHECK(parse_subclass(display_name(s)) == s);
    CHECK_FALSE(definition(s).empty());
  }
  for (Category c : kAllCategories) CHECK(parse_category(canonical_string(c)) == c);
  CHECK(parse_subclass("  Bullying. ") == Subclass::Bullying);
  CHECK(parse_subclass("PROFANITY") == Subclass::Swearing);
  CHECK(parse_subclass("race") == Subclass::RaceEthnicityReligion);
  CHECK(parse_subclass("Sexuality or gender") == Subclass::SexualityGender);
  CHECK_FALSE(parse_subclass("spam").has_value());
  CHECK(definition(Subclass::Swearing) == "Swear words, &^#$%*");
}

}  // TEST_SUITE

TEST_SUITE("ingest") {

TEST_CASE("comments are ordered by offset with file order on ties") {
  const auto raw = dump("111", "Dota 2", {{5.0, "a", "first"}, {1.0, "b", "second"}, {5.0, "c", "third"}});
  const auto parsed = parse_chat_dump(raw);
  REQUIRE(parsed.messages.size() == 3);
  CHECK(parsed.messages[0].offset_s == 1.0);
  CHECK(parsed.messages[1].text == "first");
  CHECK(parsed.messages[2].text == "third");
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(parsed.messages[i].seq == i);
    CHECK(parsed.messages[i].message_id == make_message_id("111", i));
  }
  CHECK(parsed.meta.stream_id == "111");
  CHECK(parsed.meta.streamer == "somestreamer");
  CHECK(parsed.meta.genre == Genre::MOBA);
  CHECK(parsed.meta.duration_s == 3600.0);
}

TEST_CASE("empty bodies are dropped, dirty comments skipped or rejected") {
  const auto raw = dump("1", "Minecraft", {{1, "a", "x"}, {2, "b", ""}, {3, "c", "y"}, {4, "d", "z"}});
  const auto parsed = parse_chat_dump(raw);
  CHECK(parsed.messages.size() == 3);
  CHECK(parsed.empty_comments == 1);
  CHECK_FALSE(parsed.meta.genre.has_value());

  nlohmann::json j = nlohmann::json::parse(raw);
  j["comments"].push_back({{"commenter", {{"display_name", "e"}}}, {"message", {{"body", "no offset"}}}});
  const auto lenient = parse_chat_dump(j.dump());
  CHECK(lenient.messages.size() == 3);
  CHECK(lenient.skipped_comments == 1);
  ParseOptions strict;
  strict.strict = true;
  CHECK(code_of([&] { parse_chat_dump(j.dump(), {}, strict); }) == ErrorCode::MissingField);
}

TEST_CASE("truncated or non-object documents are MalformedDump") {
  const auto raw = dump("1", "Dota 2", {{1, "a", "x"}});
  CHECK(code_of([&] { parse_chat_dump(raw.substr(0, raw.size() / 2)); }) == ErrorCode::MalformedDump);
  CHECK(code_of([&] { parse_chat_dump("[1,2]"); }) == ErrorCode::MalformedDump);
  CHECK(code_of([&] { parse_chat_dump("{\"video\":{}}"); }) == ErrorCode::MalformedDump);
}

TEST_CASE("hint wins over dump metadata") {
  StreamMetaHint hint;
  hint.game = "Valorant";
  hint.streamer = "other";
  const auto parsed = parse_chat_dump(dump("7", "Dota 2", {{1, "a", "x"}}), hint);
  CHECK(parsed.meta.game == "Valorant");
  CHECK(parsed.meta.streamer == "other");
  CHECK(parsed.meta.genre == Genre::MPShooter);
}

TEST_CASE("genre lookup") {
  CHECK(genre_of("Dota 2") == Genre::MOBA);
  CHECK(genre_of("League of Legends") == Genre::MOBA);
  CHECK(genre_of("Valorant") == Genre::MPShooter);
  CHECK(genre_of("Counter-Strike") == Genre::MPShooter);
  CHECK(genre_of("EA Sports FC 26") == Genre::SportsGames);
  CHECK_FALSE(genre_of("Minecraft").has_value());
  CHECK_FALSE(genre_of("Chess").has_value());
  GenreTable table;
  table.set("Chess", Genre::SportsGames);
  CHECK(table.genre_of("Chess") == Genre::SportsGames);
}

TEST_CASE("message ids are the first 16 hex chars of SHA-256(stream|seq)") {
  CHECK(make_message_id("abc", 3) == sha256_hex("abc|3").substr(0, 16));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest loading, duplicates and persistence") {
  TempDir dir;
  write_text(dir / "a.json", dump("100", "Dota 2", std::vector<std::tuple<double, std::string, std::string>>(
                                                       10, {1.0, "u", "hello there"})));
  write_text(dir / "b.json", dump("200", "Minecraft", std::vector<std::tuple<double, std::string, std::string>>(
                                                          15, {2.0, "v", "x"})));
  write_text(dir / "m.json",
             R"({"dumps":[{"path":"a.json","streamer":"alpha","game":"Dota 2"},
                          {"path":"b.json","streamer":"beta","game":"Minecraft"}]})");
  const Corpus corpus = load_corpus(dir / "m.json");
  CHECK(corpus.streams.size() == 2);
  CHECK(corpus.message_count() == 25);
  CHECK(corpus.summary().hours == doctest::Approx(2.0));
  CHECK(corpus.streams[0].meta.streamer == "alpha");

  write_corpus(corpus, dir / "out1");
  write_corpus(load_corpus(dir / "m.json"), dir / "out2");
  CHECK(testing::read_text(dir / "out1/messages.jsonl") == testing::read_text(dir / "out2/messages.jsonl"));
  CHECK(corpus_digest(dir / "out1") == corpus_digest(dir / "out2"));
  const Corpus back = read_corpus(dir / "out1");
  REQUIRE(back.streams.size() == 2);
  CHECK(back.streams[1].messages[14].message_id == corpus.streams[1].messages[14].message_id);
  CHECK(back.streams[0].meta.genre == Genre::MOBA);
  Corpus lossy = corpus;
  lossy.skipped_comments = 3;
  write_corpus(lossy, dir / "out3");
  CHECK(read_corpus(dir / "out3").summary().skipped_comments == 3);

  write_text(dir / "dup.json",
             R"({"dumps":[{"path":"a.json","streamer":"alpha","game":"Dota 2"},
                          {"path":"a.json","streamer":"alpha","game":"Dota 2"}]})");
  CHECK(code_of([&] { load_corpus(dir / "dup.json"); }) == ErrorCode::DuplicateStream);
  write_text(dir / "missing.json", R"({"dumps":[{"path":"nope.json","streamer":"x","game":"y"}]})");
  CHECK(code_of([&] { load_corpus(dir / "missing.json"); }) == ErrorCode::FileNotReadable);
}

}  // TEST_SUITE

TEST_SUITE("prelabel") {

TEST_CASE("allowlist and bot rules") {
  const auto rules = PreLabelRuleSet::defaults();
  ChatMessage m;
  m.user = "viewer";
  m.text = "  GG ";
  CHECK(prelabel_of(m, rules) == PreLabel::AllowlistedNonToxic);
  m.text = "gg wp";
  CHECK(prelabel_of(m, rules) == PreLabel::NeedsClassification);
  m.user = "Nightbot";
  m.text = "gg";
  CHECK(prelabel_of(m, rules) == PreLabel::BotMessage);
  m.user = "nightbot";
  m.text = "follow";
  CHECK(prelabel_of(m, rules) == PreLabel::NeedsClassification);
  CHECK(fold_message(" LoL\t") == "lol");
}

TEST_CASE("assignment counts and frequency ranking") {
  Corpus corpus;
  Stream s;
  s.meta.stream_id = "s";
  const char* texts[] = {"gg", "GG", "hello", "nice", "nice", "nice", "hi", "what"};
  for (std::size_t i = 0; i < 8; ++i) {
    ChatMessage m;
    m.stream_id = "s";
    m.seq = i;
    m.user = i == 7 ? "StreamElements" : "u";
    m.text = texts[i];
    m.message_id = make_message_id("s", i);
    s.messages.push_back(m);
  }
  add_stream(corpus, s);
  const auto a = apply_prelabels(corpus, PreLabelRuleSet::defaults());
  CHECK(a.allowlisted == 4);
  CHECK(a.bots == 1);
  CHECK(a.needs_classification == 3);
  CHECK(a.total() == 8);
  const auto top = top_frequent_messages(corpus, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0] == std::pair<std::string, std::size_t>{"nice", 3});
  CHECK(top[1] == std::pair<std::string, std::size_t>{"gg", 2});
}

TEST_CASE("rule files skip comments and blanks") {
  TempDir dir;
  write_text(dir / "allow.txt", "# common phrases\ngg\n\n  lol  \n");
  const auto entries = read_rule_file(dir / "allow.txt");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0] == "gg");
}

}  // TEST_SUITE
