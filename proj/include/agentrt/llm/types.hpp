#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agentrt::llm {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct CompletionRequest {
  std::vector<ChatMessage> messages;
  std::string model_id;
  double temperature = 0.0;
  std::vector<std::string> stop_sequences;
  bool stream = true;
  int max_output_tokens = 1024;
  // Which caller issued the request ("data", "plugins", "web",
  // "executor.sql", ...). Never sent over the wire; the scripted provider
  // matches on it.
  std::string channel;

  // Throws InvalidArgument when messages are empty, temperature is out of
  // [0,2], max_output_tokens < 1, or a system message appears anywhere but
  // first.
  void validate() const;
  // All message contents joined with '\n'.
  std::string prompt_text() const;
};

enum class FinishReason { Stop, Length, Cancelled, ContentFilter };

std::string_view to_string(FinishReason f);
FinishReason finish_reason_from_string(std::string_view s);

struct TokenEvent {
  std::string delta;
  std::optional<FinishReason> finish;

  bool operator==(const TokenEvent&) const = default;
};

nlohmann::json to_json(const ChatMessage& m);
nlohmann::json to_json(const CompletionRequest& r);

}  // namespace agentrt::llm
