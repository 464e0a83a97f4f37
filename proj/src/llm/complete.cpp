#include <optional>
#include <set>

#include "agentrt/llm/provider.hpp"

namespace agentrt::llm {

namespace {

bool rotates(ErrorCategory c) { return c == ErrorCategory::RateLimited || c == ErrorCategory::ServerError; }

}  // namespace

CompletionResult complete_stream(Provider& provider, const CompletionRequest& req, KeyPool& pool,
                                 const CompletionOptions& opts, const TokenSink& sink) {
  req.validate();
  if (opts.timeout.count() <= 0) throw Error(ErrorCategory::InvalidArgument, "timeout must be positive");
  const auto deadline = Clock::now() + opts.timeout;

  CompletionResult result;
  if (opts.cancel.cancelled()) {
    result.finish = FinishReason::Cancelled;
    sink({"", FinishReason::Cancelled});
    return result;
  }

  std::set<std::size_t> tried;
  std::optional<Error> last;
  while (true) {
    const KeyPick pick = pool.next_key(Clock::now());
    if (!tried.insert(pick.index).second) throw *last;
    ++result.key_attempts;
    result.key_index = pick.index;

    bool delivered = false;
    bool finished = false;
    // Enforces the stream contract regardless of provider: nothing after a
    // finish, cancellation honored at the next event boundary.
    auto guard = [&](const TokenEvent& ev) {
      if (finished) return;
      if (Clock::now() > deadline) throw Error(ErrorCategory::Timeout, "completion exceeded its time budget");
      delivered = true;
      if (opts.cancel.cancelled() && ev.finish != FinishReason::Cancelled) {
        finished = true;
        result.finish = FinishReason::Cancelled;
        sink({"", FinishReason::Cancelled});
        return;
      }
      result.text += ev.delta;
      if (ev.finish) {
        finished = true;
        result.finish = *ev.finish;
      }
      sink(ev);
    };

    try {
      provider.stream(req, StreamContext{pick.key, deadline, opts.cancel}, guard);
    } catch (const Error& e) {
      if (delivered || !rotates(e.category())) throw;
      if (e.category() == ErrorCategory::RateLimited) pool.mark_cooling(pick.index, Clock::now());
      last = e;
      continue;
    }
    if (!finished) guard({"", opts.cancel.cancelled() ? FinishReason::Cancelled : FinishReason::Stop});
    return result;
  }
}

CompletionResult complete(Provider& provider, const CompletionRequest& req, KeyPool& pool,
                          const CompletionOptions& opts) {
  return complete_stream(provider, req, pool, opts, [](const TokenEvent&) {});
}

}  // namespace agentrt::llm
