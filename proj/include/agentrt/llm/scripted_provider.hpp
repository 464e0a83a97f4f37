#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "agentrt/llm/provider.hpp"

namespace agentrt::llm {

// Deterministic provider that replays fixture completions.
//
// Fixture format (JSON):
//   {"entries": [
//     {"channel": "data", "turn": 0, "contains": ["..."], "text": "...",
//      "chunk_size": 4, "delay_ms": 0, "finish": "stop",
//      "reject_keys": ["k1"], "error": "rate_limited"}
//   ]}
//
// A request on channel c is the n-th on that channel (counting only played
// entries). It matches the first entry with that channel whose "turn" is n or
// "*" and whose "contains" strings all occur in the prompt. No match throws
// ScriptMismatch. "reject_keys" fail the attempt with RateLimited for the
// listed keys without advancing the turn; "error" fails every attempt with
// the named category.
class ScriptedProvider : public Provider {
 public:
  struct Entry {
    std::string channel;
    int turn = -1;  // -1 = any
    std::vector<std::string> contains;
    std::string text;
    std::size_t chunk_size = 0;  // 0 = whole text in one event
    int delay_ms = 0;
    FinishReason finish = FinishReason::Stop;
    std::vector<std::string> reject_keys;
    std::string error;
  };

  ScriptedProvider() = default;
  explicit ScriptedProvider(std::vector<Entry> entries);

  static ScriptedProvider from_json(const nlohmann::json& j);
  static ScriptedProvider from_file(const std::string& path);

  void add(Entry e);

  void stream(const CompletionRequest& req, const StreamContext& ctx, const TokenSink& sink) override;

  // Number of attempts that reached this provider with the given key.
  int attempts_with_key(const std::string& key) const;
  int turns_played(const std::string& channel) const;
  // Every request that was played, in order.
  std::vector<CompletionRequest> requests() const;
  void reset_counters();

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
  std::map<std::string, int> turns_;
  std::map<std::string, int> key_attempts_;
  std::vector<CompletionRequest> requests_;
};

}  // namespace agentrt::llm
