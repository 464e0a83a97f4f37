#include "agentrt/agent/profile.hpp"

#include "agentrt/core/error.hpp"

namespace agentrt::agent {

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Data: return "data";
    case AgentKind::Plugins: return "plugins";
    case AgentKind::Web: return "web";
  }
  return "data";
}

AgentKind agent_kind_from_string(std::string_view name) {
  if (name == "data") return AgentKind::Data;
  if (name == "plugins") return AgentKind::Plugins;
  if (name == "web") return AgentKind::Web;
  throw Error(ErrorCategory::InvalidArgument, "unknown profile: " + std::string(name));
}

AgentProfile make_profile(AgentKind kind, const PromptCatalog& catalog) {
  const std::string k(to_string(kind));
  AgentProfile p;
  p.kind = kind;
  p.system_prompt = Template(catalog.get(k + "_system"));
  p.format_instructions = Template(catalog.get(k + "_format"));
  p.suffix = Template(catalog.get(k + "_suffix"));
  p.tool_response_template = Template(catalog.get(k + "_tool_response"));
  switch (kind) {
    case AgentKind::Data:
      p.max_tool_iterations = 3;
      p.cap_notice = "I stopped here because this turn reached the maximum of three tool calls.";
      break;
    case AgentKind::Plugins:
      p.max_tool_iterations = 5;
      p.cap_notice = "I stopped here because this turn reached the maximum of 5 plugin calls.";
      break;
    case AgentKind::Web:
      p.max_tool_iterations = 5;
      p.cap_notice = "I stopped here because this turn reached the maximum of 5 WeBot calls.";
      break;
  }
  return p;
}

}  // namespace agentrt::agent
