#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace agentrt::store {

// Global variables. Each operation is atomic for its key.
class KVStore {
 public:
  virtual ~KVStore() = default;
  virtual std::optional<std::string> get(const std::string& key) = 0;
  virtual void set(const std::string& key, std::string value,
                   std::optional<std::chrono::milliseconds> ttl = std::nullopt) = 0;
  // True if the key existed.
  virtual bool del(const std::string& key) = 0;
  // Sets a time-to-live on an existing key; false if there is none.
  virtual bool expire(const std::string& key, std::chrono::milliseconds ttl) = 0;
};

class MemoryKVStore : public KVStore {
 public:
  using Clock = std::chrono::steady_clock;
  explicit MemoryKVStore(std::function<Clock::time_point()> clock = [] { return Clock::now(); });

  std::optional<std::string> get(const std::string& key) override;
  void set(const std::string& key, std::string value, std::optional<std::chrono::milliseconds> ttl = std::nullopt) override;
  bool del(const std::string& key) override;
  bool expire(const std::string& key, std::chrono::milliseconds ttl) override;
  std::size_t size();

 private:
  struct Entry {
    std::string value;
    std::optional<Clock::time_point> expires;
  };
  bool live(const Entry& e) const;

  std::function<Clock::time_point()> clock_;
  std::mutex mu_;
  std::map<std::string, Entry> entries_;
};

}  // namespace agentrt::store
