#include "agentrt/web/remote_driver.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace agentrt::web {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

RemoteDriver::RemoteDriver(std::string socket_path, std::chrono::milliseconds timeout, std::size_t html_budget)
    : socket_path_(std::move(socket_path)), timeout_(timeout), budget_(html_budget) {}

RemoteDriver::~RemoteDriver() { disconnect(); }

void RemoteDriver::connect() {
  if (fd_ >= 0) return;
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (socket_path_.size() >= sizeof addr.sun_path)
    throw Error(ErrorCategory::InvalidArgument, "socket path too long: " + socket_path_);
  std::memcpy(addr.sun_path, socket_path_.c_str(), socket_path_.size() + 1);
  fd_ = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw Error(ErrorCategory::DriverError, std::string("socket: ") + std::strerror(errno));
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const int e = errno;
    disconnect();
    throw Error(ErrorCategory::DriverError, "cannot reach browser bridge at " + socket_path_ + ": " + std::strerror(e));
  }
}

void RemoteDriver::disconnect() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  pending_.clear();
}

json RemoteDriver::call(const json& command) {
  connect();
  const auto line = command.dump() + "\n";
  for (std::size_t sent = 0; sent < line.size();) {
    const auto n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      disconnect();
      throw Error(ErrorCategory::DriverError, "browser bridge closed the connection");
    }
    sent += static_cast<std::size_t>(n);
  }
  const auto deadline = Clock::now() + timeout_;
  std::size_t nl;
  while ((nl = pending_.find('\n')) == std::string::npos) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      disconnect();  // a late reply would desynchronize the stream
      throw Error(ErrorCategory::Timeout, "browser bridge did not answer " + command.value("cmd", ""));
    }
    pollfd p{fd_, POLLIN, 0};
    if (::poll(&p, 1, static_cast<int>(left)) <= 0) continue;
    char buf[65536];
    const auto n = ::recv(fd_, buf, sizeof buf, 0);
    if (n <= 0) {
      disconnect();
      throw Error(ErrorCategory::DriverError, "browser bridge closed the connection");
    }
    pending_.append(buf, static_cast<std::size_t>(n));
  }
  const auto reply_text = pending_.substr(0, nl);
  pending_.erase(0, nl + 1);
  json reply;
  try {
    reply = json::parse(reply_text);
  } catch (const json::exception&) {
    throw Error(ErrorCategory::DriverError, "unreadable reply from browser bridge");
  }
  if (!reply.value("ok", false)) {
    const auto err = reply.value("error", json::object());
    ErrorCategory cat = ErrorCategory::DriverError;
    try {
      cat = error_category_from_string(err.value("category", "driver_error"));
    } catch (const Error&) {
    }
    if (cat != ErrorCategory::StaleElement && cat != ErrorCategory::Navigation && cat != ErrorCategory::Timeout)
      cat = ErrorCategory::DriverError;
    throw Error(cat, err.value("message", "browser bridge reported a failure"));
  }
  return reply;
}

void RemoteDriver::navigate(const std::string& url) {
  paths_.clear();
  call({{"cmd", "navigate"}, {"url", url}});
}

PageSnapshot RemoteDriver::snapshot() {
  const auto reply = call({{"cmd", "query-dom"}});
  auto s = process_dom(reply.value("dom", json::object()), reply.value("url", ""), budget_);
  paths_.clear();
  for (const auto& e : s.elements) paths_[e.id] = e.path;
  return s;
}

void RemoteDriver::perform(const WebAction& action) {
  if (std::holds_alternative<Finish>(action)) return;
  const int id = std::holds_alternative<Click>(action) ? std::get<Click>(action).id : std::get<SetValue>(action).id;
  const auto it = paths_.find(id);
  if (it == paths_.end()) throw Error(ErrorCategory::StaleElement, "no element with id " + std::to_string(id));
  if (std::holds_alternative<Click>(action)) {
    call({{"cmd", "dispatch-click"}, {"path", it->second}});
  } else {
    call({{"cmd", "set-value"}, {"path", it->second}, {"text", std::get<SetValue>(action).text}});
  }
  // Ids refer to the page as it was; the next action needs a new snapshot.
  paths_.clear();
}

}  // namespace agentrt::web
