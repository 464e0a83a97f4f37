#include "agentrt/store/kv.hpp"

namespace agentrt::store {

MemoryKVStore::MemoryKVStore(std::function<Clock::time_point()> clock) : clock_(std::move(clock)) {}

bool MemoryKVStore::live(const Entry& e) const { return !e.expires || clock_() < *e.expires; }

std::optional<std::string> MemoryKVStore::get(const std::string& key) {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (!live(it->second)) {
    entries_.erase(it);
    return std::nullopt;
  }
  return it->second.value;
}

void MemoryKVStore::set(const std::string& key, std::string value, std::optional<std::chrono::milliseconds> ttl) {
  std::lock_guard lock(mu_);
  Entry e{std::move(value), std::nullopt};
  if (ttl) e.expires = clock_() + *ttl;
  entries_[key] = std::move(e);
}

bool MemoryKVStore::del(const std::string& key) {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return false;
  const bool was_live = live(it->second);
  entries_.erase(it);
  return was_live;
}

bool MemoryKVStore::expire(const std::string& key, std::chrono::milliseconds ttl) {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end() || !live(it->second)) return false;
  it->second.expires = clock_() + ttl;
  return true;
}

std::size_t MemoryKVStore::size() {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [k, e] : entries_) n += live(e);
  return n;
}

}  // namespace agentrt::store
