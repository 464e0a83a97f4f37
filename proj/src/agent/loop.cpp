#include "agentrt/agent/loop.hpp"

#include <algorithm>

#include "agentrt/core/text.hpp"
#include "agentrt/datamodel/linearize.hpp"
#include "agentrt/datamodel/render.hpp"
#include "agentrt/parse/stream_parser.hpp"

namespace agentrt::agent {

using datamodel::Artifact;
using datamodel::Message;
using datamodel::Role;

std::string tool_names(const std::vector<AgentTool>& tools) {
  std::string out;
  for (const auto& t : tools) {
    if (!out.empty()) out += ", ";
    out += t.name;
  }
  return out;
}

std::vector<llm::ChatMessage> build_prompt(const AgentProfile& profile, const std::vector<AgentTool>& tools,
                                           const datamodel::ChatHistory& history, const std::string& input,
                                           datamodel::Timestamp now, const datamodel::TokenCounter& counter,
                                           std::size_t history_budget) {
  const Bindings b = {{"current_date", text::format_date(now)}, {"tool_names", tool_names(tools)}, {"input", input}};

  std::string system = profile.system_prompt.render(b);
  system += "\n";
  for (const auto& t : tools) system += "\n> " + t.name + ": " + t.description;
  system += "\n\n" + profile.format_instructions.render(b);

  std::vector<llm::ChatMessage> out{{"system", system}};
  if (!history.empty()) {
    for (const auto& round : datamodel::truncate_history(history, history_budget, counter).rounds) {
      for (const auto& m : round.messages) {
        if (m.role == Role::System) continue;
        auto body = datamodel::message_text(m);
        if (body.empty()) continue;
        out.push_back({m.role == Role::Assistant ? "assistant" : "user", std::move(body)});
      }
    }
  }
  out.push_back({"user", profile.suffix.render(b)});
  return out;
}

std::string compose_observation(const Template& tmpl, const Observation& observation, const std::string& names,
                                std::size_t char_budget) {
  std::string body;
  if (observation.status == ObservationStatus::Interrupted)
    body += "[interrupted] The tool run was interrupted by the user before it finished.\n";
  const std::size_t n = std::max<std::size_t>(observation.artifacts.size(), 1);
  const std::size_t each = std::max<std::size_t>(char_budget / n, 1);
  for (std::size_t i = 0; i < observation.artifacts.size(); ++i) {
    if (i) body += "\n";
    body += datamodel::linearize(observation.artifacts[i], each);
  }
  return tmpl.render({{"observation", body}, {"tool_names", names}});
}

std::string_view to_string(EndedBy e) {
  switch (e) {
    case EndedBy::FinalAnswer: return "final_answer";
    case EndedBy::IterationCap: return "iteration_cap";
    case EndedBy::Cancelled: return "cancelled";
    case EndedBy::Error: return "error";
  }
  return "error";
}

namespace {

struct ModelReply {
  std::string text;
  std::optional<parse::ActionEnd> action;
  bool cancelled = false;
};

ModelReply stream_reply(const AgentContext& ctx, const std::vector<llm::ChatMessage>& messages,
                        const CancelToken& cancel, const TurnCallbacks& cb) {
  ModelReply reply;
  parse::StreamParser parser(parse::Grammar::ChatActions);
  auto forward = [&](std::vector<parse::RoleEvent> events) {
    for (auto& e : events) {
      if (auto* end = std::get_if<parse::ActionEnd>(&e)) reply.action = *end;
      cb.on_event(e);
    }
  };
  const auto result = ctx.llm.stream(messages, ctx.profile.channel(), cancel, [&](const llm::TokenEvent& ev) {
    if (!ev.delta.empty()) forward(parser.feed(ev.delta));
  });
  forward(parser.finish());
  reply.text = result.text;
  reply.cancelled = result.finish == llm::FinishReason::Cancelled;
  return reply;
}

Observation dispatch(AgentContext& ctx, const ToolCall& call, const parse::ActionEnd& end, const std::string& input,
                     const CancelToken& cancel, const TurnCallbacks& cb) {
  if (!end.well_formed)
    return Observation::failure(ErrorCategory::LlmFormatError,
                                "The tool call could not be parsed. Use the JSON format with \"action\" and "
                                "\"action_input\" keys.");
  auto it = std::find_if(ctx.tools.begin(), ctx.tools.end(), [&](const AgentTool& t) { return t.name == call.action; });
  if (it == ctx.tools.end())
    return Observation::failure(ErrorCategory::UnknownTool,
                                "Unknown tool \"" + call.action + "\". Available tools: " + tool_names(ctx.tools));
  ToolContext tctx;
  tctx.cancel = cancel;
  tctx.user_input = input;
  tctx.emit_block = cb.on_block;
  try {
    auto obs = it->executor->execute(call, tctx);
    if (obs.artifacts.empty()) obs.artifacts.push_back(Artifact::text("(no output)"));
    return obs;
  } catch (const Error& e) {
    return Observation::failure(e.category(), e.detail());
  } catch (const std::exception& e) {
    return Observation::failure(ErrorCategory::ToolError, e.what());
  }
}

}  // namespace

TurnTranscript run_turn(AgentContext& ctx, datamodel::ChatHistory& history, const std::string& input,
                        const CancelToken& cancel, const TurnCallbacks& cb) {
  TurnTranscript tr;
  datamodel::Round round;
  round.index = history.rounds.empty() ? 0 : history.rounds.back().index + 1;
  auto add_message = [&](Role role, std::vector<Artifact> blocks) {
    for (auto& b : blocks) b = ctx.stamp(b);
    round.messages.push_back(Message{role, std::move(blocks), round.index});
  };
  add_message(Role::User, {Artifact::text(input)});

  auto messages = build_prompt(ctx.profile, ctx.tools, history, input, ctx.clock(), ctx.counter, ctx.history_budget);
  const std::string names = tool_names(ctx.tools);
  bool tools_locked = false;

  while (true) {
    ModelReply reply;
    try {
      reply = stream_reply(ctx, messages, cancel, cb);
    } catch (const Error& e) {
      cb.on_error(e.category(), e.detail());
      tr.ended_by = EndedBy::Error;
      tr.error = e.category();
      add_message(Role::Assistant, {Artifact::error(e.category(), e.detail())});
      break;
    }

    if (reply.cancelled) {
      if (!reply.text.empty()) {
        tr.items.push_back(AssistantText{reply.text});
        add_message(Role::Assistant, {Artifact::text(reply.text)});
      }
      tr.ended_by = EndedBy::Cancelled;
      break;
    }

    if (!reply.action) {
      tr.items.push_back(FinalAnswer{reply.text});
      add_message(Role::Assistant, {Artifact::text(reply.text)});
      tr.ended_by = EndedBy::FinalAnswer;
      break;
    }

    tr.items.push_back(AssistantText{reply.text});
    add_message(Role::Assistant, {Artifact::text(reply.text)});

    if (tools_locked) {
      tr.ended_by = EndedBy::FinalAnswer;
      break;
    }
    if (tr.iterations_used >= ctx.profile.max_tool_iterations) {
      const auto notice = Artifact::text(ctx.profile.cap_notice);
      cb.on_block(datamodel::render_frontend(notice));
      tr.items.push_back(FinalAnswer{ctx.profile.cap_notice});
      add_message(Role::Assistant, {notice});
      tr.ended_by = EndedBy::IterationCap;
      break;
    }

    const ToolCall call{reply.action->name, reply.action->full_input};
    tr.items.push_back(call);
    ++tr.iterations_used;
    auto obs = dispatch(ctx, call, *reply.action, input, cancel, cb);
    cb.on_observation(call, obs);
    tr.items.push_back(obs);
    add_message(Role::ToolObservation, obs.artifacts);

    if (cancel.cancelled()) {
      tr.ended_by = EndedBy::Cancelled;
      break;
    }
    if (obs.status == ObservationStatus::Interrupted) tools_locked = true;

    messages.push_back({"assistant", reply.text});
    messages.push_back({"user", compose_observation(ctx.profile.tool_response_template, obs, names)});
  }

  history.rounds.push_back(std::move(round));
  return tr;
}

}  // namespace agentrt::agent
