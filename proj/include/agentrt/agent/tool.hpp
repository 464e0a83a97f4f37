#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "agentrt/core/cancel.hpp"
#include "agentrt/datamodel/artifact.hpp"

namespace agentrt::agent {

struct ToolCall {
  std::string action;
  std::string action_input;

  bool operator==(const ToolCall&) const = default;
};

enum class ObservationStatus { Ok, ToolError, Interrupted };

std::string_view to_string(ObservationStatus s);

struct Observation {
  std::vector<datamodel::Artifact> artifacts;
  ObservationStatus status = ObservationStatus::Ok;

  static Observation ok(std::vector<datamodel::Artifact> artifacts);
  static Observation failure(ErrorCategory category, std::string message);
};

// What an executor may use while it runs.
struct ToolContext {
  CancelToken cancel;
  // The user's message for this turn.
  std::string user_input;
  // Publishes an intermediate frontend block (see datamodel render_frontend)
  // while the tool is still running.
  std::function<void(const nlohmann::json&)> emit_block = [](const nlohmann::json&) {};
};

class ToolExecutor {
 public:
  virtual ~ToolExecutor() = default;
  // Errors may be thrown as agentrt::Error; the loop turns them into a
  // ToolError (or Interrupted) observation.
  virtual Observation execute(const ToolCall& call, ToolContext& ctx) = 0;
};

// Adapts a callable into an executor.
class FunctionTool : public ToolExecutor {
 public:
  using Fn = std::function<Observation(const ToolCall&, ToolContext&)>;
  explicit FunctionTool(Fn fn) : fn_(std::move(fn)) {}
  Observation execute(const ToolCall& call, ToolContext& ctx) override { return fn_(call, ctx); }

 private:
  Fn fn_;
};

// A tool as the agent sees it.
struct AgentTool {
  std::string name;
  std::string description;
  std::shared_ptr<ToolExecutor> executor;
};

}  // namespace agentrt::agent
