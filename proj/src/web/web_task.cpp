#include "agentrt/web/web_task.hpp"

#include <regex>

#include "agentrt/agent/template.hpp"
#include "agentrt/core/text.hpp"
#include "agentrt/parse/stream_parser.hpp"

namespace agentrt::web {

using nlohmann::json;

std::string_view to_string(WebEndedBy e) {
  switch (e) {
    case WebEndedBy::Finish: return "finish";
    case WebEndedBy::StepCap: return "step_cap";
    case WebEndedBy::Interrupted: return "interrupted";
    case WebEndedBy::Error: return "error";
  }
  return "error";
}

json to_json(const WebRunReport& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    json attempts = json::array();
    for (const auto& a : s.attempts)
      attempts.push_back({{"thought", a.thought}, {"action", a.action}, {"ok", a.ok}, {"reason", a.reason}});
    steps.push_back({{"attempts", attempts}});
  }
  return {{"steps", steps},          {"ended_by", to_string(r.ended_by)}, {"final_snapshot", to_json(r.final_snapshot)},
          {"answer", r.answer},      {"error", r.error},                  {"model_calls", r.model_calls}};
}

std::string format_previous_actions(const std::vector<WebStep>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (const auto& a : steps[i].attempts) {
      if (!out.empty()) out += "\n";
      out += std::to_string(i + 1) + ". " + a.action + " — " + (a.ok ? std::string("ok") : "failed: " + a.reason);
    }
  }
  return out;
}

namespace {

struct ModelTurn {
  std::string thought;
  std::optional<parse::WebActionCall> call;
  bool cancelled = false;
};

ModelTurn ask(const llm::LlmClient& llm, const std::vector<llm::ChatMessage>& messages, const CancelToken& cancel) {
  ModelTurn turn;
  parse::StreamParser parser(parse::Grammar::WebotTags);
  auto take = [&](const std::vector<parse::RoleEvent>& events) {
    for (const auto& e : events) {
      if (const auto* t = std::get_if<parse::ThoughtDelta>(&e)) turn.thought += t->text;
      if (const auto* c = std::get_if<parse::WebActionCall>(&e); c && !turn.call) turn.call = *c;
    }
  };
  const auto result = llm.stream(messages, kWebChannel, cancel, [&](const llm::TokenEvent& ev) {
    if (!ev.delta.empty()) take(parser.feed(ev.delta));
  });
  take(parser.finish());
  turn.thought = std::string(text::trim(turn.thought));
  turn.cancelled = result.finish == llm::FinishReason::Cancelled;
  return turn;
}

std::string describe_call(const parse::WebActionCall& c) { return c.name + "(" + c.raw_args + ")"; }

}  // namespace

WebRunReport web_task(const std::string& user_query, const std::string& start_url, BrowserDriver& driver,
                      const llm::LlmClient& llm, const CancelToken& cancel, const WebTaskConfig& config,
                      const agent::PromptCatalog& catalog) {
  if (config.step_cap < 1) throw Error(ErrorCategory::InvalidArgument, "step_cap must be at least 1");
  WebRunReport report;
  auto end = [&](WebEndedBy how, std::string error = "") {
    report.ended_by = how;
    report.error = std::move(error);
    try {
      report.final_snapshot = driver.snapshot();
    } catch (const Error&) {
      // keep the last snapshot we had
    }
    return report;
  };

  try {
    if (!start_url.empty()) driver.navigate(start_url);
  } catch (const Error& e) {
    return end(WebEndedBy::Error, std::string(to_string(e.category())) + ": " + e.detail());
  }
  const auto system =
      agent::render(catalog.get("webot_system"), {{"formattedActions", formatted_actions()}, {"plan", config.plan}});

  for (int step = 0; step < config.step_cap; ++step) {
    WebStep current;
    std::string retry_message;
    bool finished = false;
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (cancel.cancelled()) return end(WebEndedBy::Interrupted);
      PageSnapshot snap;
      try {
        snap = driver.snapshot();
      } catch (const Error& e) {
        return end(WebEndedBy::Error, std::string(to_string(e.category())) + ": " + e.detail());
      }
      report.final_snapshot = snap;
      agent::Bindings b = {{"user_query", user_query},
                           {"previous_actions_string", format_previous_actions(report.steps)},
                           {"current_time", text::format_timestamp(config.clock())},
                           {"processed_html", snap.processed_html},
                           {"retry_message", retry_message}};
      const auto& tmpl = attempt == 0 ? catalog.get("webot_user") : catalog.get("webot_retry");
      ++report.model_calls;
      ModelTurn turn;
      try {
        turn = ask(llm, {{"system", system}, {"user", agent::render(tmpl, b)}}, cancel);
      } catch (const Error& e) {
        if (e.category() == ErrorCategory::Interrupted || e.category() == ErrorCategory::Cancelled)
          return end(WebEndedBy::Interrupted);
        return end(WebEndedBy::Error, std::string(to_string(e.category())) + ": " + e.detail());
      }
      if (turn.cancelled) return end(WebEndedBy::Interrupted);

      WebAttempt a;
      a.thought = turn.thought;
      std::optional<WebAction> action;
      if (!turn.call) {
        a.action = "(no action)";
        a.reason = "the reply must contain <Thought>...</Thought> and <Action>...</Action> tags";
      } else {
        auto check = check_action(*turn.call, snap);
        a.action = check.action ? render(*check.action) : describe_call(*turn.call);
        a.reason = check.problem;
        action = check.action;
      }
      if (action && std::holds_alternative<Finish>(*action)) {
        a.ok = true;
        report.answer = std::get<Finish>(*action).answer;
        current.attempts.push_back(a);
        finished = true;
        break;
      }
      if (action) {
        try {
          driver.perform(*action);
          a.ok = true;
        } catch (const Error& e) {
          a.reason = std::string(to_string(e.category())) + ": " + e.detail();
          if (e.category() == ErrorCategory::DriverError) {
            current.attempts.push_back(a);
            report.steps.push_back(current);
            return end(WebEndedBy::Error, a.reason);
          }
        }
      }
      current.attempts.push_back(a);
      if (a.ok) break;
      retry_message = a.action + " failed: " + a.reason;
    }
    report.steps.push_back(current);
    if (config.on_step) config.on_step(report.steps.size() - 1, report.steps.back());
    if (finished) return end(WebEndedBy::Finish);
  }
  return end(WebEndedBy::StepCap);
}

agent::Observation report_observation(const WebRunReport& report) {
  const auto n = std::to_string(report.steps.size());
  std::string text;
  switch (report.ended_by) {
    case WebEndedBy::Finish: text = "WeBot finished the task in " + n + " steps."; break;
    case WebEndedBy::StepCap: text = "WeBot stopped after reaching its limit of " + n + " steps."; break;
    case WebEndedBy::Interrupted: text = "WeBot was interrupted by the user after " + n + " steps."; break;
    case WebEndedBy::Error: text = "WeBot stopped after " + n + " steps because of an error: " + report.error; break;
  }
  if (!report.answer.empty()) text += "\nAnswer: " + report.answer;
  if (!report.steps.empty()) text += "\nActions:\n" + format_previous_actions(report.steps);
  text += "\nLast page (" + report.final_snapshot.url + "):\n" + report.final_snapshot.processed_html;
  agent::Observation obs = agent::Observation::ok({datamodel::Artifact::text(text, "WeBot report")});
  if (report.ended_by == WebEndedBy::Interrupted) obs.status = agent::ObservationStatus::Interrupted;
  if (report.ended_by == WebEndedBy::Error) obs.status = agent::ObservationStatus::ToolError;
  return obs;
}

WebBotTool::WebBotTool(std::shared_ptr<BrowserDriver> driver, llm::LlmClient llm, WebBotConfig config)
    : driver_(std::move(driver)), llm_(std::move(llm)), config_(std::move(config)) {}

agent::Observation WebBotTool::execute(const agent::ToolCall& call, agent::ToolContext& ctx) {
  static const std::regex url_re(R"(https?://[^\s"'<>)]+)");
  std::smatch m;
  const auto start = std::regex_search(call.action_input, m, url_re) ? m.str(0) : config_.default_start_url;
  auto cfg = config_.task;
  cfg.on_step = [&, user = config_.task.on_step](std::size_t i, const WebStep& s) {
    const auto& last = s.attempts.back();
    ctx.emit_block({{"block_type", "card"},
                    {"name", "WeBot step " + std::to_string(i + 1)},
                    {"payload",
                     {{"kind", "webot_step"},
                      {"step", i + 1},
                      {"thought", last.thought},
                      {"action", last.action},
                      {"ok", last.ok},
                      {"reason", last.reason},
                      {"attempts", s.attempts.size()}}}});
    if (user) user(i, s);
  };
  return report_observation(web_task(call.action_input, start, *driver_, llm_, ctx.cancel, cfg));
}

}  // namespace agentrt::web
