#include "agentrt/llm/key_pool.hpp"

namespace agentrt::llm {

AllKeysCoolingError::AllKeysCoolingError(Clock::time_point available_at, std::size_t key_index)
    : Error(ErrorCategory::AllKeysCooling,
            "all keys cooling; key " + std::to_string(key_index) + " available in " +
                std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(available_at - Clock::now())
                                   .count()) +
                " ms"),
      available_at_(available_at),
      soonest_key_(key_index) {}

KeyPool::KeyPool(std::vector<std::string> keys, std::chrono::milliseconds cooldown)
    : keys_(std::move(keys)), cool_until_(keys_.size(), Clock::time_point::min()), cooldown_(cooldown) {
  if (keys_.empty()) throw Error(ErrorCategory::InvalidArgument, "key pool is empty");
}

KeyPick KeyPool::next_key(Clock::time_point now) {
  std::lock_guard lock(mu_);
  const std::size_t n = keys_.size();
  std::size_t soonest = cursor_ % n;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = (cursor_ + step) % n;
    if (cool_until_[i] <= now) {
      cursor_ = (i + 1) % n;
      return {i, keys_[i]};
    }
    if (cool_until_[i] < cool_until_[soonest]) soonest = i;
  }
  throw AllKeysCoolingError(cool_until_[soonest], soonest);
}

void KeyPool::mark_cooling(std::size_t index, Clock::time_point now) {
  std::lock_guard lock(mu_);
  if (index >= keys_.size()) throw Error(ErrorCategory::InvalidArgument, "key index out of range");
  cool_until_[index] = now + cooldown_;
}

bool KeyPool::cooling(std::size_t index, Clock::time_point now) const {
  std::lock_guard lock(mu_);
  return index < keys_.size() && cool_until_[index] > now;
}

}  // namespace agentrt::llm
