#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agentrt {

// Platform-wide error taxonomy. Every error that crosses a module boundary
// carries one of these categories; the string forms are part of the wire
// format (error frames, observation text, stored Error artifacts).
enum class ErrorCategory {
  Timeout,
  RateLimited,
  AllKeysCooling,
  AuthFailed,
  ServerError,
  ContentFiltered,
  Cancelled,
  MalformedResponse,
  ScriptMismatch,
  UnknownTool,
  ToolError,
  HttpError,
  ConnectionFailed,
  SqlSyntaxError,
  NonSelectRejected,
  LlmFormatError,
  UnknownEndpoint,
  SpecParseError,
  SpecInvalid,
  DuplicateName,
  EmbedderUnavailable,
  ClientUnavailable,
  InterpreterMissing,
  TimeLimit,
  MemoryLimit,
  OutputLimit,
  StaleElement,
  Navigation,
  DriverError,
  Interrupted,
  UnboundPlaceholder,
  TooLarge,
  UnreadableContent,
  StoreUnavailable,
  NotFound,
  InvalidArgument,
  Exhausted,
  Internal,
};

std::string_view to_string(ErrorCategory category);
ErrorCategory error_category_from_string(std::string_view name);

// Retry policy for provider and executor failures.
bool is_retryable(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string detail);

  ErrorCategory category() const noexcept { return category_; }
  const std::string& detail() const noexcept { return detail_; }
  bool retryable() const noexcept { return is_retryable(category_); }

 private:
  ErrorCategory category_;
  std::string detail_;
};

}  // namespace agentrt
