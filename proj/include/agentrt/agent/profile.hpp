#pragma once

#include <string>
#include <string_view>

#include "agentrt/agent/prompt_catalog.hpp"
#include "agentrt/agent/template.hpp"

namespace agentrt::agent {

enum class AgentKind { Data, Plugins, Web };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view name);

struct AgentProfile {
  AgentKind kind = AgentKind::Data;
  Template system_prompt;
  Template format_instructions;
  Template suffix;
  Template tool_response_template;
  int max_tool_iterations = 3;
  // Final answer used when a turn ends at the iteration cap.
  std::string cap_notice;

  // LLM channel name for this profile's completions ("data", "plugins", "web").
  std::string channel() const { return std::string(to_string(kind)); }
};

// Builds a profile from the catalog's "<kind>_system", "<kind>_format",
// "<kind>_suffix" and "<kind>_tool_response" prompts. Caps: Data 3,
// Plugins 5, Web 5.
AgentProfile make_profile(AgentKind kind, const PromptCatalog& catalog = PromptCatalog::builtin());

}  // namespace agentrt::agent
