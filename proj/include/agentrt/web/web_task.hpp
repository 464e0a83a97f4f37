#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentrt/agent/prompt_catalog.hpp"
#include "agentrt/agent/tool.hpp"
#include "agentrt/llm/client.hpp"
#include "agentrt/web/driver.hpp"

namespace agentrt::web {

inline constexpr const char* kWebChannel = "executor.web";

struct WebAttempt {
  std::string thought;
  std::string action;  // rendered call, or the raw call when it did not validate
  bool ok = false;
  std::string reason;  // why it failed
  bool operator==(const WebAttempt&) const = default;
};

// One step: the first attempt and, if it failed, at most one retry.
struct WebStep {
  std::vector<WebAttempt> attempts;
  bool operator==(const WebStep&) const = default;
};

enum class WebEndedBy { Finish, StepCap, Interrupted, Error };
std::string_view to_string(WebEndedBy e);

struct WebRunReport {
  std::vector<WebStep> steps;
  WebEndedBy ended_by = WebEndedBy::StepCap;
  PageSnapshot final_snapshot;
  std::string answer;  // finish() argument
  std::string error;   // set when ended_by is Error
  int model_calls = 0;
  bool operator==(const WebRunReport&) const = default;
};

nlohmann::json to_json(const WebRunReport& r);

// "<n>. <action> — ok" or "<n>. <action> — failed: <reason>", one line per
// attempt, n being the step ordinal. Empty for no steps.
std::string format_previous_actions(const std::vector<WebStep>& steps);

struct WebTaskConfig {
  int step_cap = 20;
  std::string plan;
  std::function<std::chrono::system_clock::time_point()> clock = [] { return std::chrono::system_clock::now(); };
  // Called after every completed step.
  std::function<void(std::size_t index, const WebStep&)> on_step;
};

// Drives the browser until the model finishes, the step cap is reached, the
// run is cancelled or the driver fails for good. An invalid or failed action
// is re-prompted once with the retry template; a second failure is recorded
// and the run moves on to the next step. An empty start_url keeps the
// current page.
WebRunReport web_task(const std::string& user_query, const std::string& start_url, BrowserDriver& driver,
                      const llm::LlmClient& llm, const CancelToken& cancel = CancelToken::none(),
                      const WebTaskConfig& config = {},
                      const agent::PromptCatalog& catalog = agent::PromptCatalog::builtin());

// The chat agent's view of a run: how it ended, the actions, the answer and
// the last page. Interrupted runs carry Interrupted status.
agent::Observation report_observation(const WebRunReport& report);

struct WebBotConfig {
  WebTaskConfig task;
  std::string default_start_url;
};

// Exposes web_task as the Web agent's tool. The start page is the first
// http(s) URL in the tool input, else the configured default.
class WebBotTool : public agent::ToolExecutor {
 public:
  WebBotTool(std::shared_ptr<BrowserDriver> driver, llm::LlmClient llm, WebBotConfig config = {});
  agent::Observation execute(const agent::ToolCall& call, agent::ToolContext& ctx) override;

 private:
  std::shared_ptr<BrowserDriver> driver_;
  llm::LlmClient llm_;
  WebBotConfig config_;
};

}  // namespace agentrt::web
