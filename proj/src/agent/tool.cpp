#include "agentrt/agent/tool.hpp"

namespace agentrt::agent {

std::string_view to_string(ObservationStatus s) {
  switch (s) {
    case ObservationStatus::Ok: return "ok";
    case ObservationStatus::ToolError: return "tool_error";
    case ObservationStatus::Interrupted: return "interrupted";
  }
  return "ok";
}

Observation Observation::ok(std::vector<datamodel::Artifact> artifacts) {
  if (artifacts.empty()) artifacts.push_back(datamodel::Artifact::text("(no output)"));
  return {std::move(artifacts), ObservationStatus::Ok};
}

Observation Observation::failure(ErrorCategory category, std::string message) {
  return {{datamodel::Artifact::error(category, std::move(message))},
          category == ErrorCategory::Interrupted ? ObservationStatus::Interrupted : ObservationStatus::ToolError};
}

}  // namespace agentrt::agent
