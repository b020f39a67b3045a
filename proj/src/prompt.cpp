#include "chattox/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "chattox/digest.hpp"

namespace chattox {

namespace {

std::string taxonomy_block() {
  std::string out;
  Category current{};
  bool first = true;
  for (Subclass s : kAllSubclasses) {
    const Category c = category_of(s);
    if (first || c != current) {
      out += std::string(display_name(c)) + ":\n";
      current = c;
      first = false;
    }
    out += "  - " + std::string(display_name(s)) + ": " + std::string(definition(s)) + "\n";
  }
  return out;
}

std::string one_line(std::string_view text) {
  std::string out(text);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

std::string_view to_string(PromptStage stage) {
  return stage == PromptStage::Binary ? "binary" : "subclass";
}

const std::string& binary_instruction() {
  static const std::string text =
      "You are a content moderator for live-stream chat. Decide whether the target chat "
      "message is toxic according to the following categories and definitions of "
      "inappropriate or harmful messages:\n" +
      taxonomy_block() +
      "The preceding chat messages from the same stream are given only as context; judge "
      "the target message alone.\n"
      "Answer with exactly one word: yes if the target message is toxic, no otherwise.";
  return text;
}

const std::string& subclass_instruction() {
  static const std::string text = [] {
    std::string labels;
    for (Subclass s : kAllSubclasses) {
      labels += "  - ";
      labels += canonical_string(s);
      labels += "\n";
    }
    return "You are a content moderator for live-stream chat. The target chat message has "
           "been judged toxic. Assign it to the toxicity subclasses defined below:\n" +
           taxonomy_block() +
           "The preceding chat messages from the same stream are given only as context; "
           "label the target message alone.\n"
           "Candidate labels:\n" +
           labels +
           "Answer on a single line in the form: primary: <label>; secondary: <label or "
           "none>\n"
           "Use only the candidate labels above. The secondary label must differ from the "
           "primary label.";
  }();
  return text;
}

PromptPayload render_prompt(const ChatMessage& target, const Context& context,
                            PromptStage stage) {
  PromptPayload p;
  p.stage = stage;
  p.system_instruction =
      stage == PromptStage::Binary ? binary_instruction() : subclass_instruction();

  std::string content = "Context:\n";
  if (context.empty()) {
    content += kNoContextMarker;
    content += "\n";
  } else {
    for (const auto& line : context.lines) {
      content += one_line(line.user) + ": " + one_line(line.text) + "\n";
    }
  }
  content += "\nTarget message:\n" + one_line(target.user) + ": " + one_line(target.text);
  p.user_content = std::move(content);
  p.message_id = target.message_id;
  p.context = context;
  return p;
}

std::string PromptPayload::digest() const {
  std::string key(to_string(stage));
  key += '\x1f';
  key += system_instruction;
  key += '\x1f';
  key += user_content;
  return sha256_hex(key);
}

BinaryVerdict parse_binary_response(std::string_view raw) {
  std::size_t i = 0;
  while (i < raw.size() && !std::isalnum(static_cast<unsigned char>(raw[i]))) ++i;
  std::string token;
  while (i < raw.size() && std::isalpha(static_cast<unsigned char>(raw[i]))) {
    token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
    ++i;
  }
  if (token == "yes") return BinaryVerdict::Toxic;
  if (token == "no") return BinaryVerdict::NonToxic;
  return BinaryVerdict::Invalid;
}

std::optional<SubclassVerdict> parse_subclass_response(std::string_view raw) {
  std::string text;
  text.reserve(raw.size());
  bool space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !text.empty()) text.push_back(' ');
    space = false;
    text.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }

  std::vector<SubclassAlias> aliases(subclass_aliases().begin(), subclass_aliases().end());
  std::stable_sort(aliases.begin(), aliases.end(),
                   [](const auto& a, const auto& b) { return a.text.size() > b.text.size(); });

  std::vector<Subclass> found;
  for (std::size_t pos = 0; pos < text.size() && found.size() < 2;) {
    if (pos > 0 && is_word_char(text[pos - 1])) {
      ++pos;
      continue;
    }
    bool matched = false;
    for (const auto& alias : aliases) {
      const std::size_t end = pos + alias.text.size();
      if (end > text.size() || text.compare(pos, alias.text.size(), alias.text) != 0) continue;
      if (end < text.size() && is_word_char(text[end])) continue;
      found.push_back(alias.subclass);
      pos = end;
      matched = true;
      break;
    }
    if (!matched) ++pos;
  }
  if (found.empty()) return std::nullopt;
  SubclassVerdict v{found[0], std::nullopt};
  if (found.size() > 1 && found[1] != found[0]) v.secondary = found[1];
  return v;
}

}  // namespace chattox
