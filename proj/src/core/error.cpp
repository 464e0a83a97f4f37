#include "agentrt/core/error.hpp"

#include <array>
#include <utility>

namespace agentrt {
namespace {

constexpr std::array<std::pair<ErrorCategory, std::string_view>, 38> kNames{{
    {ErrorCategory::Timeout, "timeout"},
    {ErrorCategory::RateLimited, "rate_limited"},
    {ErrorCategory::AllKeysCooling, "all_keys_cooling"},
    {ErrorCategory::AuthFailed, "auth_failed"},
    {ErrorCategory::ServerError, "server_error"},
    {ErrorCategory::ContentFiltered, "content_filtered"},
    {ErrorCategory::Cancelled, "cancelled"},
    {ErrorCategory::MalformedResponse, "malformed_response"},
    {ErrorCategory::ScriptMismatch, "script_mismatch"},
    {ErrorCategory::UnknownTool, "unknown_tool"},
    {ErrorCategory::ToolError, "tool_error"},
    {ErrorCategory::HttpError, "http_error"},
    {ErrorCategory::ConnectionFailed, "connection_failed"},
    {ErrorCategory::SqlSyntaxError, "sql_syntax_error"},
    {ErrorCategory::NonSelectRejected, "non_select_rejected"},
    {ErrorCategory::LlmFormatError, "llm_format_error"},
    {ErrorCategory::UnknownEndpoint, "unknown_endpoint"},
    {ErrorCategory::SpecParseError, "spec_parse_error"},
    {ErrorCategory::SpecInvalid, "spec_invalid"},
    {ErrorCategory::DuplicateName, "duplicate_name"},
    {ErrorCategory::EmbedderUnavailable, "embedder_unavailable"},
    {ErrorCategory::ClientUnavailable, "client_unavailable"},
    {ErrorCategory::InterpreterMissing, "interpreter_missing"},
    {ErrorCategory::TimeLimit, "time_limit"},
    {ErrorCategory::MemoryLimit, "memory_limit"},
    {ErrorCategory::OutputLimit, "output_limit"},
    {ErrorCategory::StaleElement, "stale_element"},
    {ErrorCategory::Navigation, "navigation"},
    {ErrorCategory::DriverError, "driver_error"},
    {ErrorCategory::Interrupted, "interrupted"},
    {ErrorCategory::UnboundPlaceholder, "unbound_placeholder"},
    {ErrorCategory::TooLarge, "too_large"},
    {ErrorCategory::UnreadableContent, "unreadable_content"},
    {ErrorCategory::StoreUnavailable, "store_unavailable"},
    {ErrorCategory::NotFound, "not_found"},
    {ErrorCategory::InvalidArgument, "invalid_argument"},
    {ErrorCategory::Exhausted, "exhausted"},
    {ErrorCategory::Internal, "internal"},
}};

}  // namespace

std::string_view to_string(ErrorCategory category) {
  for (const auto& [c, name] : kNames) {
    if (c == category) return name;
  }
  return "internal";
}

ErrorCategory error_category_from_string(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  throw Error(ErrorCategory::InvalidArgument, "unknown error category: " + std::string(name));
}

bool is_retryable(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Timeout:
    case ErrorCategory::RateLimited:
    case ErrorCategory::AllKeysCooling:
    case ErrorCategory::ServerError:
    case ErrorCategory::HttpError:
    case ErrorCategory::ConnectionFailed:
    case ErrorCategory::MalformedResponse:
    case ErrorCategory::LlmFormatError:
    case ErrorCategory::UnknownEndpoint:
    case ErrorCategory::SqlSyntaxError:
    case ErrorCategory::StaleElement:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCategory category, std::string detail)
    : std::runtime_error(std::string(to_string(category)) + ": " + detail),
      category_(category),
      detail_(std::move(detail)) {}

}  // namespace agentrt
