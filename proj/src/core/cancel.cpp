#include "agentrt/core/cancel.hpp"

namespace agentrt {

CancelToken::CancelToken() : state_(std::make_shared<State>()) {}

void CancelToken::cancel() const {
  {
    std::lock_guard lock(state_->mu);
    state_->cancelled = true;
  }
  state_->cv.notify_all();
}

bool CancelToken::cancelled() const {
  std::lock_guard lock(state_->mu);
  return state_->cancelled;
}

bool CancelToken::sleep_for(std::chrono::milliseconds d) const {
  std::unique_lock lock(state_->mu);
  return !state_->cv.wait_for(lock, d, [this] { return state_->cancelled; });
}

const CancelToken& CancelToken::none() {
  static const CancelToken token;
  return token;
}

}  // namespace agentrt
