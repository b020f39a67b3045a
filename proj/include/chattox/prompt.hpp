#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "chattox/context.hpp"
#include "chattox/ingest.hpp"
#include "chattox/taxonomy.hpp"

namespace chattox {

enum class PromptStage { Binary, Subclass };

std::string_view to_string(PromptStage stage);

struct PromptPayload {
  std::string system_instruction;
  std::string user_content;
  PromptStage stage = PromptStage::Binary;

  // Not part of the prompt; carried for request capture and inspection.
  std::string message_id;
  Context context;

  /// SHA-256 over stage, instruction and content. Replay logs are keyed by this.
  std::string digest() const;
};

inline constexpr std::string_view kNoContextMarker = "(no prior context)";

const std::string& binary_instruction();
const std::string& subclass_instruction();

PromptPayload render_prompt(const ChatMessage& target, const Context& context, PromptStage stage);

enum class BinaryVerdict { Toxic, NonToxic, Invalid };

/// Leading "yes"/"no" token, case-insensitive, punctuation ignored.
BinaryVerdict parse_binary_response(std::string_view raw);

struct SubclassVerdict {
  Subclass primary;
  std::optional<Subclass> secondary;
};

/// First and optional second distinct taxonomy tokens in the response; nullopt when none.
std::optional<SubclassVerdict> parse_subclass_response(std::string_view raw);

}  // namespace chattox
