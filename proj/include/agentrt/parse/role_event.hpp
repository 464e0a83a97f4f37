#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace agentrt::parse {

enum class Grammar {
  ChatActions,  // markdown text plus one ```json {"action", "action_input"} block
  WebotTags,    // <Thought>...</Thought> and <Action>name(args)</Action>
};

// Byte offsets into the whole stream, half-open.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

enum class WarningCategory { TrailingAfterAction, Unterminated, Malformed, Overflow };

std::string_view to_string(WarningCategory category);

struct TextDelta {
  std::string text;
  bool operator==(const TextDelta&) const = default;
};
struct ThoughtDelta {
  std::string text;
  bool operator==(const ThoughtDelta&) const = default;
};
struct ActionStart {
  bool operator==(const ActionStart&) const = default;
};
struct ActionName {
  std::string name;
  bool operator==(const ActionName&) const = default;
};
struct ActionInputDelta {
  std::string text;
  bool operator==(const ActionInputDelta&) const = default;
};
// `raw` is the exact source text of the fenced block. `well_formed` is false
// when the block was cut short or broke the schema after the action began.
struct ActionEnd {
  std::string name;
  std::string full_input;
  std::string raw;
  bool well_formed = true;
  bool operator==(const ActionEnd&) const = default;
};
// `raw` is the exact text between <Action> and </Action>; `args` are the
// top-level comma-separated arguments, trimmed, quotes preserved.
struct WebActionCall {
  std::string name;
  std::string raw_args;
  std::vector<std::string> args;
  std::string raw;
  bool operator==(const WebActionCall&) const = default;
};
struct ParseWarning {
  WarningCategory category = WarningCategory::Malformed;
  Span span;
  bool operator==(const ParseWarning&) const = default;
};

using RoleEvent = std::variant<TextDelta, ThoughtDelta, ActionStart, ActionName, ActionInputDelta, ActionEnd,
                               WebActionCall, ParseWarning>;

std::string_view event_type(const RoleEvent& event);
nlohmann::json to_json(const RoleEvent& event);

// Merges adjacent delta events of the same type. Two event sequences that
// differ only in how deltas were split are equal after coalescing.
std::vector<RoleEvent> coalesce(std::vector<RoleEvent> events);

}  // namespace agentrt::parse
