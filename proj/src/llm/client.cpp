#include "agentrt/llm/client.hpp"

namespace agentrt::llm {

CompletionRequest LlmClient::request(std::vector<ChatMessage> messages, std::string channel) const {
  CompletionRequest r;
  r.messages = std::move(messages);
  r.model_id = model_id;
  r.temperature = temperature;
  r.max_output_tokens = max_output_tokens;
  r.channel = std::move(channel);
  return r;
}

CompletionResult LlmClient::stream(std::vector<ChatMessage> messages, std::string channel,
                                   const CancelToken& cancel, const TokenSink& sink) const {
  if (!provider || !pool) throw Error(ErrorCategory::Internal, "LLM client is not configured");
  CompletionOptions opts;
  opts.timeout = timeout;
  opts.cancel = cancel;
  return complete_stream(*provider, request(std::move(messages), std::move(channel)), *pool, opts, sink);
}

CompletionResult LlmClient::complete(std::vector<ChatMessage> messages, std::string channel,
                                     const CancelToken& cancel) const {
  return stream(std::move(messages), std::move(channel), cancel, [](const TokenEvent&) {});
}

}  // namespace agentrt::llm
