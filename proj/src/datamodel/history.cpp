#include "agentrt/datamodel/history.hpp"

#include <algorithm>

#include "agentrt/datamodel/linearize.hpp"

namespace agentrt::datamodel {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::ToolObservation: return "tool_observation";
  }
  return "user";
}

Role role_from_string(std::string_view name) {
  if (name == "system") return Role::System;
  if (name == "user") return Role::User;
  if (name == "assistant") return Role::Assistant;
  if (name == "tool_observation") return Role::ToolObservation;
  throw Error(ErrorCategory::InvalidArgument, "unknown role: " + std::string(name));
}

std::string message_text(const Message& message) {
  std::string out;
  for (const auto& block : message.blocks) {
    auto text = linearize(block, kMessageBlockBudget);
    if (text.empty()) continue;
    if (!out.empty()) out += '\n';
    out += text;
  }
  return out;
}

std::size_t count_tokens(const Round& round, const TokenCounter& counter) {
  std::size_t total = 0;
  for (const auto& m : round.messages) total += counter.count(message_text(m));
  return total;
}

std::size_t count_tokens(const ChatHistory& history, const TokenCounter& counter) {
  std::size_t total = 0;
  for (const auto& r : history.rounds) total += count_tokens(r, counter);
  return total;
}

namespace {

Round shrink_round(const Round& round, double factor) {
  Round out{round.index, {}};
  for (const auto& m : round.messages) {
    Message shrunk{m.role, {}, m.round_index};
    for (const auto& block : m.blocks) {
      const auto full = linearize(block, kMessageBlockBudget);
      const auto budget = static_cast<std::size_t>(static_cast<double>(full.size()) * factor);
      auto text = budget == 0 ? std::string{} : linearize(block, budget);
      shrunk.blocks.push_back(Artifact::text(std::move(text), block.name()).with_id(block.id(), block.created_at()));
    }
    out.messages.push_back(std::move(shrunk));
  }
  return out;
}

}  // namespace

ChatHistory truncate_history(const ChatHistory& history, std::size_t token_budget,
                             const TokenCounter& counter) {
  if (token_budget == 0) throw Error(ErrorCategory::InvalidArgument, "token_budget must be positive");
  if (history.rounds.empty()) return {};

  std::vector<std::size_t> counts;
  counts.reserve(history.rounds.size());
  std::size_t total = 0;
  for (const auto& r : history.rounds) {
    counts.push_back(count_tokens(r, counter));
    total += counts.back();
  }
  std::size_t first = 0;
  while (total > token_budget && first + 1 < history.rounds.size()) {
    total -= counts[first];
    ++first;
  }
  ChatHistory out;
  out.rounds.assign(history.rounds.begin() + static_cast<std::ptrdiff_t>(first), history.rounds.end());
  if (total <= token_budget) return out;

  // Only the newest round remains and it is still over budget.
  const Round& last = out.rounds.back();
  double factor = static_cast<double>(token_budget) / static_cast<double>(total);
  for (;;) {
    Round shrunk = shrink_round(last, factor);
    if (count_tokens(shrunk, counter) <= token_budget || factor == 0.0) {
      out.rounds.back() = std::move(shrunk);
      return out;
    }
    factor = factor < 1e-4 ? 0.0 : factor * 0.8;
  }
}

void to_json(nlohmann::json& j, const Message& m) {
  j = {{"role", to_string(m.role)}, {"round_index", m.round_index}, {"blocks", m.blocks}};
}

void from_json(const nlohmann::json& j, Message& m) {
  m.role = role_from_string(j.at("role").get<std::string>());
  m.round_index = j.at("round_index").get<std::size_t>();
  m.blocks = j.at("blocks").get<std::vector<Artifact>>();
}

void to_json(nlohmann::json& j, const Round& r) { j = {{"index", r.index}, {"messages", r.messages}}; }

void from_json(const nlohmann::json& j, Round& r) {
  r.index = j.at("index").get<std::size_t>();
  r.messages = j.at("messages").get<std::vector<Message>>();
}

void to_json(nlohmann::json& j, const ChatHistory& h) { j = {{"rounds", h.rounds}}; }

void from_json(const nlohmann::json& j, ChatHistory& h) { h.rounds = j.at("rounds").get<std::vector<Round>>(); }

}  // namespace agentrt::datamodel
