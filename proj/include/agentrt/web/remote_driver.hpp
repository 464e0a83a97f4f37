#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "agentrt/web/driver.hpp"

namespace agentrt::web {

// Talks to a browser bridge (for instance a debugger-protocol extension
// host) over a Unix socket, one JSON object per line each way:
//   -> {"cmd": "navigate", "url": "..."}
//   -> {"cmd": "query-dom"}                  <- {"ok": true, "url": "...", "dom": <DomNode>}
//   -> {"cmd": "dispatch-click", "path": [0, 2]}
//   -> {"cmd": "set-value", "path": [0, 2], "text": "..."}
//   <- {"ok": true} | {"ok": false, "error": {"category": "stale_element", "message": "..."}}
// Paths are child-index paths into the last DOM returned by query-dom.
class RemoteDriver : public BrowserDriver {
 public:
  RemoteDriver(std::string socket_path, std::chrono::milliseconds timeout = std::chrono::seconds(10),
               std::size_t html_budget = 8000);
  ~RemoteDriver() override;
  RemoteDriver(const RemoteDriver&) = delete;
  RemoteDriver& operator=(const RemoteDriver&) = delete;

  void navigate(const std::string& url) override;
  PageSnapshot snapshot() override;
  void perform(const WebAction& action) override;

 private:
  nlohmann::json call(const nlohmann::json& command);
  void connect();
  void disconnect();

  std::string socket_path_;
  std::chrono::milliseconds timeout_;
  std::size_t budget_;
  int fd_ = -1;
  std::string pending_;
  std::map<int, std::vector<int>> paths_;
};

}  // namespace agentrt::web
