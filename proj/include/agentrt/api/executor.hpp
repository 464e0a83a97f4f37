#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "agentrt/agent/prompt_catalog.hpp"
#include "agentrt/agent/tool.hpp"
#include "agentrt/datamodel/artifact.hpp"
#include "agentrt/llm/client.hpp"
#include "agentrt/tools/descriptor.hpp"

namespace agentrt::api {

inline constexpr const char* kChannel = "executor.api";

struct Selection {
  std::string endpoint;
  nlohmann::json input_json = nlohmann::json::object();
};

struct Trial {
  std::string endpoint;
  nlohmann::json input_json;
  std::string output;  // truncated to ApiConfig::trial_output_cap
  std::optional<ErrorCategory> error;
  std::string error_detail;
};

// [{"endpoint", "input_json", "output", "errors"}], "errors" being null or
// "<category>: <detail>".
nlohmann::json trial_history_json(const std::vector<Trial>& trials);

// Compact JSON list of the endpoints' prompt renderings.
std::string specs_string(const std::vector<const tools::EndpointSpec*>& specs);

// Converts string values to the schema's integer/number/boolean type where
// they parse cleanly.
nlohmann::json coerce_to_schema(const nlohmann::json& input, const nlohmann::json& schema);

// Parses a reply holding {"endpoint": ..., "input_json": {...}}, fenced or
// bare. Throws LlmFormatError.
Selection parse_selection(const std::string& reply);

// Asks the model to pick an endpoint and fill its arguments. With a
// non-empty trial history the retry prompt is used instead of the first-try
// prompt. Throws LlmFormatError or UnknownEndpoint.
Selection select_and_fill(const std::vector<const tools::EndpointSpec*>& specs, const std::string& input_str,
                          const llm::LlmClient& llm, const std::vector<Trial>& history = {},
                          const CancelToken& cancel = CancelToken::none(),
                          const agent::PromptCatalog& catalog = agent::PromptCatalog::builtin());

struct InvokeOptions {
  std::string base_url;
  std::optional<tools::AuthBinding> auth;
  std::chrono::milliseconds timeout = std::chrono::seconds(30);
  // Bodies longer than this are linearized down to it.
  std::size_t char_budget = 4096;
};

// Performs the HTTP call. Path parameters are substituted, query and header
// parameters attached, body parameters sent as a JSON object. A JSON array
// of objects becomes a Table artifact, anything else Text. Throws
// InvalidArgument (missing required parameter), HttpError, Timeout or
// ConnectionFailed.
datamodel::Artifact invoke(const tools::EndpointSpec& endpoint, const nlohmann::json& input_json,
                           const InvokeOptions& opts);

// The first alphabetic word of the reply decides: "yes" true, anything else
// false.
bool validate(const std::string& output, const std::string& input_str, const std::string& specs_str,
              const llm::LlmClient& llm, const CancelToken& cancel = CancelToken::none(),
              const agent::PromptCatalog& catalog = agent::PromptCatalog::builtin());
bool first_word_is_yes(const std::string& reply);

struct ApiConfig {
  int max_trials = 3;
  std::size_t trial_output_cap = 2048;
  InvokeOptions invoke;
};

enum class ApiOutcome { Validated, Exhausted };

struct ApiRunResult {
  ApiOutcome outcome = ApiOutcome::Exhausted;
  // The validated output, or the last output obtained (if any) when
  // exhausted.
  std::optional<datamodel::Artifact> output;
  std::vector<Trial> trials;
};

// Select, invoke, validate; on failure retry with the accumulated trial
// history, at most max_trials times. Throws Interrupted if cancelled.
ApiRunResult run(const tools::ToolDescriptor& plugin, const std::string& input_str, const llm::LlmClient& llm,
                 const ApiConfig& config, const CancelToken& cancel = CancelToken::none(),
                 const agent::PromptCatalog& catalog = agent::PromptCatalog::builtin());

// Exposes an OpenAPI plugin to the agent loop.
class ApiPluginTool : public agent::ToolExecutor {
 public:
  ApiPluginTool(tools::ToolDescriptor plugin, llm::LlmClient llm, ApiConfig config = {});
  agent::Observation execute(const agent::ToolCall& call, agent::ToolContext& ctx) override;

 private:
  tools::ToolDescriptor plugin_;
  llm::LlmClient llm_;
  ApiConfig config_;
};

}  // namespace agentrt::api
