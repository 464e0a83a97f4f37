#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agentrt/agent/profile.hpp"
#include "agentrt/agent/tool.hpp"
#include "agentrt/datamodel/history.hpp"
#include "agentrt/llm/client.hpp"
#include "agentrt/parse/role_event.hpp"

namespace agentrt::agent {

// "A, B, C" in tool order.
std::string tool_names(const std::vector<AgentTool>& tools);

// [System(system prompt + tool list + format instructions),
//  ...history rounds that fit history_budget tokens...,
//  User(suffix)]. The date slot is bound to now (UTC, YYYY-MM-DD).
std::vector<llm::ChatMessage> build_prompt(const AgentProfile& profile, const std::vector<AgentTool>& tools,
                                           const datamodel::ChatHistory& history, const std::string& input,
                                           datamodel::Timestamp now, const datamodel::TokenCounter& counter,
                                           std::size_t history_budget);

inline constexpr std::size_t kObservationCharBudget = 4000;

// Renders the tool response template with the observation linearized under
// char_budget (shared evenly between its artifacts).
std::string compose_observation(const Template& tmpl, const Observation& observation, const std::string& tool_names,
                                std::size_t char_budget = kObservationCharBudget);

struct AssistantText {
  std::string text;
};
struct FinalAnswer {
  std::string text;
};
using TranscriptItem = std::variant<AssistantText, ToolCall, Observation, FinalAnswer>;

enum class EndedBy { FinalAnswer, IterationCap, Cancelled, Error };

std::string_view to_string(EndedBy e);

struct TurnTranscript {
  std::vector<TranscriptItem> items;
  int iterations_used = 0;
  EndedBy ended_by = EndedBy::FinalAnswer;
  std::optional<ErrorCategory> error;
};

// Live notifications during a turn, all on the calling thread.
struct TurnCallbacks {
  std::function<void(const parse::RoleEvent&)> on_event = [](const parse::RoleEvent&) {};
  std::function<void(const ToolCall&, const Observation&)> on_observation = [](const ToolCall&,
                                                                               const Observation&) {};
  // Frontend blocks published by tools and by the loop itself (cap notice).
  std::function<void(const nlohmann::json&)> on_block = [](const nlohmann::json&) {};
  std::function<void(ErrorCategory, const std::string&)> on_error = [](ErrorCategory, const std::string&) {};
};

struct AgentContext {
  AgentProfile profile;
  std::vector<AgentTool> tools;
  llm::LlmClient llm;
  datamodel::TokenCounter counter = datamodel::TokenCounter::approximate();
  std::size_t history_budget = 3000;
  std::function<datamodel::Timestamp()> clock = [] { return std::chrono::system_clock::now(); };
  // Assigns ids to artifacts before they are stored in history.
  std::function<datamodel::Artifact(const datamodel::Artifact&)> stamp = [](const datamodel::Artifact& a) {
    return a;
  };
};

// One user turn of the ReAct loop. Appends exactly one round (the user input
// and everything the agent produced, partial if cancelled) to history.
TurnTranscript run_turn(AgentContext& ctx, datamodel::ChatHistory& history, const std::string& input,
                        const CancelToken& cancel, const TurnCallbacks& callbacks = {});

}  // namespace agentrt::agent
