#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "agentrt/core/error.hpp"

namespace agentrt::llm {

using Clock = std::chrono::steady_clock;

// Raised by KeyPool::next_key when every key is cooling down.
class AllKeysCoolingError : public Error {
 public:
  AllKeysCoolingError(Clock::time_point available_at, std::size_t key_index);

  Clock::time_point available_at() const noexcept { return available_at_; }
  std::size_t soonest_key() const noexcept { return soonest_key_; }

 private:
  Clock::time_point available_at_;
  std::size_t soonest_key_;
};

struct KeyPick {
  std::size_t index = 0;
  std::string key;
};

// Round-robin credential rotation with per-key cooldown. All methods are
// thread-safe; next_key picks and advances atomically.
class KeyPool {
 public:
  explicit KeyPool(std::vector<std::string> keys,
                   std::chrono::milliseconds cooldown = std::chrono::seconds(10));

  KeyPool(const KeyPool&) = delete;
  KeyPool& operator=(const KeyPool&) = delete;

  // Next non-cooling key after the previous pick. Throws AllKeysCoolingError
  // carrying the earliest availability when none is free.
  KeyPick next_key(Clock::time_point now);

  void mark_cooling(std::size_t index, Clock::time_point now);
  bool cooling(std::size_t index, Clock::time_point now) const;

  std::size_t size() const { return keys_.size(); }
  std::chrono::milliseconds cooldown() const { return cooldown_; }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> keys_;
  std::vector<Clock::time_point> cool_until_;
  std::chrono::milliseconds cooldown_;
  std::size_t cursor_ = 0;  // index to consider first on the next pick
};

}  // namespace agentrt::llm
