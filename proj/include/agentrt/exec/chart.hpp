#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

#include "agentrt/core/cancel.hpp"
#include "agentrt/datamodel/artifact.hpp"
#include "agentrt/llm/client.hpp"

namespace agentrt::exec {

inline constexpr const char* kChartChannel = "executor.chart";

// Chart-spec dialect:
//   {"chart_type": "bar"|"line"|"pie"|"scatter", "title": string,
//    "x": {"name": string, "values": [...]},
//    "series": [{"name": string, "values": [...]}, ...]}
// Every series has as many values as x. Returns the first violation, or
// nullopt for a valid spec.
std::optional<std::string> chart_spec_problem(const nlohmann::json& spec);

// Asks the model for a chart spec over the table; an invalid spec is sent
// back once with the problem, and a second invalid spec throws SpecInvalid.
datamodel::Artifact build_chart(const std::string& nl_query, const datamodel::Artifact& table, const llm::LlmClient& llm,
                                const CancelToken& cancel = CancelToken::none());

}  // namespace agentrt::exec
