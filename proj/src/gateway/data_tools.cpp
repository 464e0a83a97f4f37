#include "agentrt/gateway/data_tools.hpp"

#include <algorithm>

#include "agentrt/datamodel/linearize.hpp"
#include "agentrt/datamodel/render.hpp"
#include "agentrt/exec/chart.hpp"
#include "agentrt/exec/code.hpp"
#include "agentrt/exec/profile.hpp"
#include "agentrt/exec/sql.hpp"

namespace agentrt::gateway {

using agent::Observation;
using agent::ToolCall;
using agent::ToolContext;
using datamodel::Artifact;
using datamodel::ArtifactKind;

std::vector<std::string> data_tool_names() { return {kPythonTool, kSqlTool, kProfileTool, kChartTool, kDatasetTool}; }

std::vector<tools::ToolDescriptor> builtin_descriptors() {
  auto d = [](std::string name, std::string description, tools::ToolKind kind = tools::ToolKind::Builtin) {
    tools::ToolDescriptor t;
    t.name = std::move(name);
    t.description = std::move(description);
    t.kind = kind;
    return t;
  };
  return {
      d(kPythonTool,
        "Writes and runs a Python program for a data task over the uploaded files; returns the code, its console "
        "output and any files or charts it saves."),
      d(kSqlTool, "Answers a question about an uploaded SQLite database by writing and running a read-only SQL query."),
      d(kProfileTool, "Summarizes an uploaded table: per-column type, missing values, distinct counts, min and max."),
      d(kChartTool, "Draws a bar, line, pie or scatter chart from an uploaded table."),
      d(kDatasetTool, "Searches public datasets by keyword and returns links to matching datasets."),
      d(kWebBotTool, "Operates a web browser to complete a task on a website, such as filling a form or searching.",
        tools::ToolKind::WebBot),
  };
}

const store::GroundingEntry* pick_grounding(const store::GroundingPool& pool, const std::string& input,
                                            const std::vector<ArtifactKind>& kinds) {
  const auto& entries = pool.entries();
  auto accepted = [&](const store::GroundingEntry& e) {
    return std::find(kinds.begin(), kinds.end(), e.artifact.kind()) != kinds.end();
  };
  const store::GroundingEntry* named = nullptr;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (accepted(*it) && input.find(it->key) != std::string::npos &&
        (!named || it->key.size() > named->key.size()))
      named = &*it;  // longest mentioned key wins ("a-2.csv" over "a")
  if (named) return named;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (accepted(*it)) return &*it;
  return nullptr;
}

namespace {

class DataTool : public agent::ToolExecutor {
 public:
  DataTool(std::string name, const store::Session& session, llm::LlmClient llm, DataToolDeps deps)
      : name_(std::move(name)), session_(session), llm_(std::move(llm)), deps_(std::move(deps)) {}

  Observation execute(const ToolCall& call, ToolContext& ctx) override {
    if (name_ == kPythonTool) return python(call, ctx);
    if (name_ == kSqlTool) return sql(call, ctx);
    if (name_ == kProfileTool) return profile(call);
    if (name_ == kChartTool) return chart(call, ctx);
    return datasets(call);
  }

 private:
  Observation python(const ToolCall& call, ToolContext& ctx) {
    std::vector<exec::GroundingInput> inputs;
    for (const auto& e : session_.grounding.entries())
      if (!e.path.empty()) inputs.push_back({{e.key, e.path}, datamodel::linearize(e.artifact, 600)});
    const auto run = exec::build_and_run_code(call.action_input, inputs, llm_, deps_.limits, deps_.sandbox, ctx.cancel);
    const auto code = Artifact::code("python", run.code);
    ctx.emit_block(datamodel::render_frontend(code));
    std::vector<Artifact> out{code};
    std::string console = run.result.stdout_text;
    if (!run.result.stderr_text.empty()) {
      if (!console.empty() && console.back() != '\n') console += '\n';
      console += run.result.stderr_text;
    }
    if (run.result.exit.kind != exec::ExitKind::Ok) {
      if (!console.empty() && console.back() != '\n') console += '\n';
      console += exec::describe(run.result.exit);
    }
    out.push_back(Artifact::console(console.empty() ? "(no output)" : console));
    for (const auto& a : run.result.produced_artifacts) out.push_back(a);
    Observation obs = Observation::ok(std::move(out));
    if (run.result.exit.kind != exec::ExitKind::Ok) obs.status = agent::ObservationStatus::ToolError;
    return obs;
  }

  Observation sql(const ToolCall& call, ToolContext& ctx) {
    const auto* db = pick_grounding(session_.grounding, call.action_input, {ArtifactKind::DatabaseRef});
    if (!db || db->path.empty()) return Observation::failure(ErrorCategory::NotFound, "no database has been uploaded");
    exec::SqlEngine engine(db->path);
    const auto ans = exec::sql_answer(call.action_input, engine.table_info(), "SQLite", llm_, engine, "", ctx.cancel);
    const auto code = Artifact::code("sql", ans.sql);
    ctx.emit_block(datamodel::render_frontend(code));
    return Observation::ok({code, Artifact::table(ans.outcome.table(), "query result"), Artifact::text(ans.answer)});
  }

  Observation profile(const ToolCall& call) {
    const auto* t = pick_grounding(session_.grounding, call.action_input, {ArtifactKind::Table});
    if (!t) return Observation::failure(ErrorCategory::NotFound, "no table has been uploaded");
    return Observation::ok({exec::profile_data(t->artifact.with_name(t->key))});
  }

  Observation chart(const ToolCall& call, ToolContext& ctx) {
    const auto* t = pick_grounding(session_.grounding, call.action_input, {ArtifactKind::Table});
    if (!t) return Observation::failure(ErrorCategory::NotFound, "no table has been uploaded");
    return Observation::ok({exec::build_chart(call.action_input, t->artifact, llm_, ctx.cancel)});
  }

  Observation datasets(const ToolCall& call) {
    if (!deps_.datasets)
      return Observation::failure(ErrorCategory::ClientUnavailable, "dataset search is not configured");
    auto cards = exec::dataset_search(call.action_input, *deps_.datasets);
    if (cards.empty()) return Observation::ok({Artifact::text("No datasets matched \"" + call.action_input + "\".")});
    return Observation::ok(std::move(cards));
  }

  std::string name_;
  const store::Session& session_;
  llm::LlmClient llm_;
  DataToolDeps deps_;
};

}  // namespace

std::shared_ptr<agent::ToolExecutor> make_data_tool(const std::string& name, const store::Session& session,
                                                    const llm::LlmClient& llm, const DataToolDeps& deps) {
  const auto names = data_tool_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) return nullptr;
  return std::make_shared<DataTool>(name, session, llm, deps);
}

}  // namespace agentrt::gateway
