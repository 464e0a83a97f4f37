#pragma once

#include <memory>
#include <string>
#include <vector>

#include "agentrt/agent/tool.hpp"
#include "agentrt/exec/dataset.hpp"
#include "agentrt/exec/sandbox.hpp"
#include "agentrt/llm/client.hpp"
#include "agentrt/store/session.hpp"
#include "agentrt/tools/descriptor.hpp"

namespace agentrt::gateway {

inline constexpr const char* kPythonTool = "python";
inline constexpr const char* kSqlTool = "sql";
inline constexpr const char* kProfileTool = "data_profiling";
inline constexpr const char* kChartTool = "chart";
inline constexpr const char* kDatasetTool = "dataset_search";
inline constexpr const char* kWebBotTool = "WeBot";

struct DataToolDeps {
  exec::SandboxLimits limits;
  exec::SandboxOptions sandbox;
  std::shared_ptr<exec::DatasetSearchClient> datasets;  // null disables dataset_search
};

// Builtin descriptors: the five data tools and WeBot.
std::vector<tools::ToolDescriptor> builtin_descriptors();
std::vector<std::string> data_tool_names();

// An executor for a builtin data tool bound to the session's grounding
// pool, or null for an unknown name. The session must outlive the turn.
std::shared_ptr<agent::ToolExecutor> make_data_tool(const std::string& name, const store::Session& session,
                                                    const llm::LlmClient& llm, const DataToolDeps& deps);

// The grounding entry a tool input refers to: the most recent entry whose
// key occurs in the input, else the most recent entry of an accepted kind.
const store::GroundingEntry* pick_grounding(const store::GroundingPool& pool, const std::string& input,
                                            const std::vector<datamodel::ArtifactKind>& kinds);

}  // namespace agentrt::gateway
