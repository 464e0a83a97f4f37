#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>

namespace agentrt {

// Shared cancellation flag. Copies observe the same state; cancel() may be
// called from any thread and wakes every sleeper.
class CancelToken {
 public:
  CancelToken();

  void cancel() const;
  bool cancelled() const;

  // Sleeps for `d` unless cancelled first. Returns true if the full interval
  // elapsed, false if woken by cancellation.
  bool sleep_for(std::chrono::milliseconds d) const;

  // A token that never fires.
  static const CancelToken& none();

 private:
  struct State {
    std::mutex mu;
    std::condition_variable cv;
    bool cancelled = false;
  };
  std::shared_ptr<State> state_;
};

}  // namespace agentrt
