#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "agentrt/core/cancel.hpp"
#include "agentrt/llm/key_pool.hpp"
#include "agentrt/llm/types.hpp"

namespace agentrt::llm {

using TokenSink = std::function<void(const TokenEvent&)>;

struct StreamContext {
  std::string key;
  Clock::time_point deadline;
  CancelToken cancel;
};

// A chat-completion backend. stream() delivers events in generation order and
// ends with exactly one event carrying `finish`, or throws agentrt::Error.
// On cancellation it must emit finish=Cancelled at the next event boundary.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual void stream(const CompletionRequest& req, const StreamContext& ctx, const TokenSink& sink) = 0;
};

struct CompletionOptions {
  std::chrono::milliseconds timeout = std::chrono::seconds(60);
  CancelToken cancel;
};

struct CompletionResult {
  std::string text;
  FinishReason finish = FinishReason::Stop;
  int key_attempts = 0;
  std::size_t key_index = 0;
};

// Streams one completion, rotating through the pool. RateLimited and
// ServerError failures that occur before any event reached the sink are
// retried on the next key (RateLimited also puts the key into cooldown); each
// key is tried at most once per call. Once every key is cooling the call
// raises AllKeysCoolingError.
CompletionResult complete_stream(Provider& provider, const CompletionRequest& req, KeyPool& pool,
                                 const CompletionOptions& opts, const TokenSink& sink);

// Blocking form: same policy, deltas collected into the result text.
CompletionResult complete(Provider& provider, const CompletionRequest& req, KeyPool& pool,
                          const CompletionOptions& opts = {});

}  // namespace agentrt::llm
