#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "agentrt/datamodel/artifact.hpp"

namespace agentrt::datamodel {

inline constexpr std::string_view kTableDelimiter = " | ";

// Elision marker appended to a truncated table: "\n… (N rows total)".
std::string table_elision_marker(std::size_t total_rows);
// Marker appended to tail-truncated text: "\n… (N chars total)".
std::string text_elision_marker(std::size_t total_chars);

// Tail-truncates `s` to at most `budget` bytes, appending the text marker
// when there is room for it. Never splits a UTF-8 sequence.
std::string truncate_text(std::string_view s, std::size_t budget);

// Renders an artifact for an LLM context window. The result never exceeds
// `char_budget` bytes and is deterministic. Tables keep their header and as
// many leading rows as fit; other kinds are tail-truncated; binary kinds
// become a bracketed placeholder. Throws InvalidArgument if char_budget is 0.
std::string linearize(const Artifact& artifact, std::size_t char_budget);

}  // namespace agentrt::datamodel
