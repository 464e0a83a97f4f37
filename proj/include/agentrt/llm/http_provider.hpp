#pragma once

#include <string>

#include "agentrt/llm/provider.hpp"

namespace agentrt::llm {

// Client for the common chat-completions wire shape: POST
// {base_url}/chat/completions with "stream": true, answered by
// "data: {...}" server-sent chunks and a final "data: [DONE]".
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(std::string base_url);

  void stream(const CompletionRequest& req, const StreamContext& ctx, const TokenSink& sink) override;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string path_prefix_;
};

// Maps an HTTP status from a provider to the error taxonomy.
ErrorCategory category_for_status(int status);

// Decodes one SSE "data:" payload. Returns false for the [DONE] sentinel.
// Throws MalformedResponse when the payload is not a completion chunk.
bool decode_chunk(const std::string& data, TokenEvent& out);

}  // namespace agentrt::llm
