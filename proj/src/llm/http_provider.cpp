#include "agentrt/llm/http_provider.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace agentrt::llm {

ErrorCategory category_for_status(int status) {
  if (status == 429) return ErrorCategory::RateLimited;
  if (status == 401 || status == 403) return ErrorCategory::AuthFailed;
  if (status == 408 || status == 504) return ErrorCategory::Timeout;
  if (status >= 500) return ErrorCategory::ServerError;
  return ErrorCategory::MalformedResponse;
}

bool decode_chunk(const std::string& data, TokenEvent& out) {
  if (data == "[DONE]") return false;
  out = {};
  try {
    const auto j = nlohmann::json::parse(data);
    if (j.contains("error")) throw Error(ErrorCategory::ServerError, "provider error: " + j["error"].dump());
    const auto& choice = j.at("choices").at(0);
    if (choice.contains("delta")) {
      const auto& d = choice["delta"];
      if (d.contains("content") && d["content"].is_string()) out.delta = d["content"].get<std::string>();
    }
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      const auto f = choice["finish_reason"].get<std::string>();
      out.finish = f == "length"           ? FinishReason::Length
                   : f == "content_filter" ? FinishReason::ContentFilter
                                           : FinishReason::Stop;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::MalformedResponse, std::string("undecodable chunk: ") + e.what());
  }
  return true;
}

HttpProvider::HttpProvider(std::string base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCategory::InvalidArgument, "base_url needs a scheme");
  const auto path_start = base_url.find('/', scheme_end + 3);
  origin_ = base_url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

void HttpProvider::stream(const CompletionRequest& req, const StreamContext& ctx, const TokenSink& sink) {
  httplib::Client cli(origin_);
  const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(ctx.deadline - Clock::now());
  if (remaining.count() <= 0) throw Error(ErrorCategory::Timeout, "no time left for the request");
  cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(remaining));
  cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(remaining));

  auto body = to_json(req);
  body["stream"] = true;

  httplib::Request hreq;
  hreq.method = "POST";
  hreq.path = path_prefix_ + "/chat/completions";
  hreq.headers = {{"Authorization", "Bearer " + ctx.key}, {"Accept", "text/event-stream"}};
  hreq.body = body.dump();
  hreq.set_header("Content-Type", "application/json");

  int status = 0;
  std::string error_body;
  std::string pending;
  bool done = false;
  bool sent_finish = false;
  bool cancelled = false;
  bool timed_out = false;
  std::optional<Error> failure;

  hreq.response_handler = [&](const httplib::Response& r) {
    status = r.status;
    return true;
  };
  hreq.content_receiver = [&](const char* data, size_t len, uint64_t, uint64_t) {
    if (status != 200) {
      error_body.append(data, len);
      return error_body.size() < 65536;
    }
    if (ctx.cancel.cancelled()) {
      cancelled = true;
      return false;
    }
    if (Clock::now() > ctx.deadline) {
      timed_out = true;
      return false;
    }
    pending.append(data, len);
    std::size_t nl;
    while (!done && (nl = pending.find('\n')) != std::string::npos) {
      std::string line = pending.substr(0, nl);
      pending.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.rfind("data:", 0) != 0) continue;
      std::string payload = line.substr(5);
      if (!payload.empty() && payload.front() == ' ') payload.erase(0, 1);
      try {
        TokenEvent ev;
        if (!decode_chunk(payload, ev)) {
          done = true;
          break;
        }
        if (!ev.delta.empty()) sink({ev.delta, std::nullopt});
        if (ev.finish) {
          sink({"", ev.finish});
          sent_finish = true;
          done = true;
        }
      } catch (const Error& e) {
        failure = e;
        return false;
      }
    }
    return !done;
  };

  httplib::Response res;
  httplib::Error err = httplib::Error::Success;
  const bool ok = cli.send(hreq, res, err);
  if (failure) throw *failure;
  if (cancelled) {
    sink({"", FinishReason::Cancelled});
    return;
  }
  if (timed_out) throw Error(ErrorCategory::Timeout, "completion exceeded its time budget");
  if (done) {
    if (!sent_finish) sink({"", FinishReason::Stop});
    return;
  }
  if (!ok) {
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
      throw Error(ErrorCategory::Timeout, "provider did not answer in time");
    if (status != 0 && status != 200)
      throw Error(category_for_status(status), "HTTP " + std::to_string(status) + ": " + error_body);
    throw Error(ErrorCategory::ConnectionFailed, "request failed: " + httplib::to_string(err));
  }
  if (res.status != 200)
    throw Error(category_for_status(res.status), "HTTP " + std::to_string(res.status) + ": " + error_body);
  throw Error(ErrorCategory::MalformedResponse, "stream ended without a terminator");
}

}  // namespace agentrt::llm
