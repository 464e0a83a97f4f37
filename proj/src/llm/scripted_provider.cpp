#include "agentrt/llm/scripted_provider.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include "agentrt/core/text.hpp"

namespace agentrt::llm {

namespace {

// Splits on code point boundaries, `n` code points per chunk.
std::vector<std::string> utf8_chunks(const std::string& s, std::size_t n) {
  if (n == 0) return {s};
  std::vector<std::string> out;
  std::string cur;
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 1;
    const auto c = static_cast<unsigned char>(s[i]);
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    cur.append(s, i, len);
    i += len;
    if (++count == n) {
      out.push_back(std::move(cur));
      cur.clear();
      count = 0;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

ScriptedProvider::ScriptedProvider(std::vector<Entry> entries) : entries_(std::move(entries)) {}

ScriptedProvider ScriptedProvider::from_json(const nlohmann::json& j) {
  std::vector<Entry> entries;
  for (const auto& e : j.at("entries")) {
    Entry x;
    x.channel = e.at("channel").get<std::string>();
    if (e.contains("turn") && !(e["turn"].is_string() && e["turn"] == "*")) x.turn = e["turn"].get<int>();
    x.contains = e.value("contains", std::vector<std::string>{});
    x.text = e.value("text", "");
    x.chunk_size = e.value("chunk_size", std::size_t{0});
    x.delay_ms = e.value("delay_ms", 0);
    x.finish = finish_reason_from_string(e.value("finish", "stop"));
    x.reject_keys = e.value("reject_keys", std::vector<std::string>{});
    x.error = e.value("error", "");
    if (!x.error.empty()) error_category_from_string(x.error);  // validate early
    entries.push_back(std::move(x));
  }
  return ScriptedProvider(std::move(entries));
}

ScriptedProvider ScriptedProvider::from_file(const std::string& path) {
  try {
    return from_json(nlohmann::json::parse(text::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::InvalidArgument, "bad script " + path + ": " + e.what());
  }
}

void ScriptedProvider::add(Entry e) {
  std::lock_guard lock(mu_);
  entries_.push_back(std::move(e));
}

void ScriptedProvider::stream(const CompletionRequest& req, const StreamContext& ctx, const TokenSink& sink) {
  Entry entry;
  {
    std::lock_guard lock(mu_);
    ++key_attempts_[ctx.key];
    const int turn = turns_[req.channel];
    const std::string prompt = req.prompt_text();
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) {
      if (e.channel != req.channel || (e.turn != -1 && e.turn != turn)) return false;
      return std::all_of(e.contains.begin(), e.contains.end(),
                         [&](const std::string& g) { return prompt.find(g) != std::string::npos; });
    });
    if (it == entries_.end()) {
      const std::string tail = prompt.size() > 200 ? prompt.substr(prompt.size() - 200) : prompt;
      throw Error(ErrorCategory::ScriptMismatch,
                  "no script entry for channel '" + req.channel + "' turn " + std::to_string(turn) +
                      "; prompt ends with: " + tail);
    }
    if (!it->error.empty()) throw Error(error_category_from_string(it->error), "scripted failure");
    if (std::find(it->reject_keys.begin(), it->reject_keys.end(), ctx.key) != it->reject_keys.end())
      throw Error(ErrorCategory::RateLimited, "scripted rate limit for key " + ctx.key);
    entry = *it;
    ++turns_[req.channel];
    requests_.push_back(req);
  }

  for (const auto& chunk : utf8_chunks(entry.text, entry.chunk_size)) {
    if (ctx.cancel.cancelled()) {
      sink({"", FinishReason::Cancelled});
      return;
    }
    if (entry.delay_ms > 0) {
      const auto wake = Clock::now() + std::chrono::milliseconds(entry.delay_ms);
      if (wake > ctx.deadline) {
        ctx.cancel.sleep_for(std::chrono::duration_cast<std::chrono::milliseconds>(ctx.deadline - Clock::now()));
        if (!ctx.cancel.cancelled()) throw Error(ErrorCategory::Timeout, "scripted completion exceeded deadline");
      } else {
        ctx.cancel.sleep_for(std::chrono::milliseconds(entry.delay_ms));
      }
      if (ctx.cancel.cancelled()) {
        sink({"", FinishReason::Cancelled});
        return;
      }
    }
    sink({chunk, std::nullopt});
  }
  sink({"", entry.finish});
}

int ScriptedProvider::attempts_with_key(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = key_attempts_.find(key);
  return it == key_attempts_.end() ? 0 : it->second;
}

int ScriptedProvider::turns_played(const std::string& channel) const {
  std::lock_guard lock(mu_);
  auto it = turns_.find(channel);
  return it == turns_.end() ? 0 : it->second;
}

std::vector<CompletionRequest> ScriptedProvider::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

void ScriptedProvider::reset_counters() {
  std::lock_guard lock(mu_);
  turns_.clear();
  key_attempts_.clear();
  requests_.clear();
}

}  // namespace agentrt::llm
