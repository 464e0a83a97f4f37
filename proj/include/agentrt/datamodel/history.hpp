#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "agentrt/datamodel/artifact.hpp"
#include "agentrt/datamodel/token_counter.hpp"

namespace agentrt::datamodel {

enum class Role { System, User, Assistant, ToolObservation };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

struct Message {
  Role role = Role::User;
  std::vector<Artifact> blocks;
  std::size_t round_index = 0;

  bool operator==(const Message&) const = default;
};

// One user message followed by the agent's full response chain:
// (assistant action, tool observation)* then a final assistant message.
struct Round {
  std::size_t index = 0;
  std::vector<Message> messages;

  bool operator==(const Round&) const = default;
};

struct ChatHistory {
  std::vector<Round> rounds;

  bool empty() const { return rounds.empty(); }
  bool operator==(const ChatHistory&) const = default;
};

// Per-artifact char budget used when a message is rendered for the model.
inline constexpr std::size_t kMessageBlockBudget = 8000;

// The text a message contributes to a prompt: its blocks linearized and
// joined by newlines (empty renderings are skipped).
std::string message_text(const Message& message);

std::size_t count_tokens(const Round& round, const TokenCounter& counter);
std::size_t count_tokens(const ChatHistory& history, const TokenCounter& counter);

// Drops whole rounds from the front until the history fits `token_budget`.
// The newest round is always kept; if it alone is over budget its artifacts
// are re-linearized with proportionally smaller char budgets until it fits.
// Throws InvalidArgument if token_budget is 0.
ChatHistory truncate_history(const ChatHistory& history, std::size_t token_budget,
                             const TokenCounter& counter);

void to_json(nlohmann::json& j, const Message& m);
void from_json(const nlohmann::json& j, Message& m);
void to_json(nlohmann::json& j, const Round& r);
void from_json(const nlohmann::json& j, Round& r);
void to_json(nlohmann::json& j, const ChatHistory& h);
void from_json(const nlohmann::json& j, ChatHistory& h);

}  // namespace agentrt::datamodel
