#pragma once

#include <string>

#include "agentrt/core/error.hpp"

#include "agentrt/web/action.hpp"
#include "agentrt/web/dom.hpp"

namespace agentrt::web {

// A browser as seen by the Web agent. Element ids in actions refer to the
// most recent snapshot; a driver must fail with StaleElement rather than act
// on a different element when the page changed since.
//
// Errors: Navigation (unreachable URL), StaleElement, Timeout, DriverError
// (the browser itself is gone or misbehaving).
class BrowserDriver {
 public:
  virtual ~BrowserDriver() = default;
  virtual void navigate(const std::string& url) = 0;
  virtual PageSnapshot snapshot() = 0;
  // Finish is not performed.
  virtual void perform(const WebAction& action) = 0;
};

}  // namespace agentrt::web
