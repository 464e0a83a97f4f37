#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agentrt::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
std::vector<std::string> split_lines(std::string_view s);

// Largest prefix of `s` no longer than `max_bytes` that does not end inside a
// UTF-8 multi-byte sequence.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes);

// Body of the first ``` fenced block tagged `lang` (case-insensitive), else
// of the first fenced block of any tag. An unclosed fence runs to the end.
std::optional<std::string> fenced_block(std::string_view s, std::string_view lang);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view encoded);

std::string sha256_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// ISO calendar date (YYYY-MM-DD) in UTC.
std::string format_date(std::chrono::system_clock::time_point t);
// ISO timestamp with seconds (YYYY-MM-DDTHH:MM:SSZ) in UTC.
std::string format_timestamp(std::chrono::system_clock::time_point t);

}  // namespace agentrt::text
