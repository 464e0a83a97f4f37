#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "agentrt/llm/provider.hpp"

namespace agentrt::llm {

// A provider, its key pool and call defaults, bundled for callers that issue
// completions (the agent loop and tool-embedded LLM calls).
struct LlmClient {
  Provider* provider = nullptr;
  KeyPool* pool = nullptr;
  std::string model_id;
  std::chrono::milliseconds timeout = std::chrono::seconds(60);
  double temperature = 0.0;
  int max_output_tokens = 1024;

  CompletionRequest request(std::vector<ChatMessage> messages, std::string channel) const;

  CompletionResult stream(std::vector<ChatMessage> messages, std::string channel, const CancelToken& cancel,
                          const TokenSink& sink) const;
  CompletionResult complete(std::vector<ChatMessage> messages, std::string channel,
                            const CancelToken& cancel = CancelToken::none()) const;
};

}  // namespace agentrt::llm
