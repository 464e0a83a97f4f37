#include <doctest.h>

#include <filesystem>
#include <random>

#include "agentrt/agent/loop.hpp"
#include "agentrt/core/text.hpp"
#include "agentrt/llm/scripted_provider.hpp"

using namespace agentrt;
using namespace agentrt::agent;
using datamodel::Artifact;

namespace {

std::string tool_call(const std::string& name, const std::string& input) {
  return "Let me check.\n```json\n{\"action\": \"" + name + "\", \"action_input\": \"" + input + "\"}\n```";
}

llm::ScriptedProvider::Entry scripted(const std::string& channel, const std::string& text, int turn = -1,
                                      std::size_t chunk = 5) {
  llm::ScriptedProvider::Entry e;
  e.channel = channel;
  e.text = text;
  e.turn = turn;
  e.chunk_size = chunk;
  return e;
}

struct Harness {
  llm::ScriptedProvider provider;
  llm::KeyPool pool{{"k"}};
  AgentContext ctx;
  int dispatches = 0;

  explicit Harness(AgentKind kind, std::vector<std::string> tools = {"python"}) {
    ctx.profile = make_profile(kind);
    ctx.llm.provider = &provider;
    ctx.llm.pool = &pool;
    ctx.llm.model_id = "test";
    for (const auto& name : tools)
      ctx.tools.push_back({name, "a tool named " + name, std::make_shared<FunctionTool>([this](const ToolCall& c, ToolContext&) {
                             ++dispatches;
                             return Observation::ok({Artifact::text("result for " + c.action_input)});
                           })});
  }
};

std::vector<std::string> event_types(const std::vector<parse::RoleEvent>& ev) {
  std::vector<std::string> out;
  for (const auto& e : ev) out.emplace_back(parse::event_type(e));
  return out;
}

}  // namespace

TEST_CASE("templates: placeholders, literal braces and unbound slots") {
  Template t("{\n  \"action\": {tool_names} {x1} {1bad} { spaced } {}");
  CHECK(t.placeholders() == std::set<std::string>{"tool_names", "x1"});
  CHECK(t.render({{"tool_names", "A"}, {"x1", "B"}, {"unused", "C"}}) == "{\n  \"action\": A B {1bad} { spaced } {}");
  try {
    t.render({{"tool_names", "A"}});
    FAIL("expected UnboundPlaceholder");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::UnboundPlaceholder);
    CHECK(e.detail().find("{x1}") != std::string::npos);
  }
  CHECK(render("{a}{a}", {{"a", "{a}"}}) == "{a}{a}");
}

TEST_CASE("prompt catalog ships the agent and executor prompts with their texts") {
  const auto& c = PromptCatalog::builtin();
  CHECK(c.all().size() == 20);
  CHECK(c.get("data_tool_response").find("limit the number of iterations to a maximum of three") != std::string::npos);
  CHECK(c.get("plugins_tool_response").find("limit the number of iterations to a maximum of 5") != std::string::npos);
  CHECK(c.get("webot_system").find("You may retry a failed action up to one time.") != std::string::npos);
  CHECK(c.get("webot_system").find("<Thought>I should click the add to cart button</Thought>\n<Action>click(223)</Action>") !=
        std::string::npos);
  CHECK(c.get("web_format").find("// The action to take. Must be WeBot") != std::string::npos);
  CHECK(c.get("data_tool_response").rfind("TOOL RESPONSE:", 0) == 0);
  CHECK(c.get("api_stop").find("Answer only by 'yes' or 'no'") != std::string::npos);
  CHECK(c.get("sql_prompt").find("SQLQuery: \"SQL Query to run\"") != std::string::npos);
  CHECK(c.get("plugins_system").find("Today is {current_date}, and you should adapt") != std::string::npos);

  CHECK(Template(c.get("webot_user")).placeholders() ==
        std::set<std::string>{"user_query", "previous_actions_string", "current_time", "processed_html"});
  CHECK(Template(c.get("api_retry")).placeholders() ==
        std::set<std::string>{"specs_str", "input_str", "trial_history"});
  for (const auto& [name, body] : c.all()) {
    CHECK(body.find("{{") == std::string::npos);
    CHECK(body.find("datetime") == std::string::npos);
  }
}

TEST_CASE("prompt catalog rejects drifted files") {
  const auto dir = std::filesystem::temp_directory_path() / "agentrt_catalog_test";
  std::filesystem::remove_all(dir);
  std::filesystem::copy(AGENTRT_PROMPT_DIR, dir);
  CHECK_NOTHROW(PromptCatalog::load(dir));
  text::write_file(dir / "data_suffix.txt", "{input} extra\n");
  try {
    PromptCatalog::load(dir);
    FAIL("expected checksum failure");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Internal);
  }
  std::filesystem::remove(dir / "data_suffix.txt");
  CHECK_THROWS_AS(PromptCatalog::load(dir), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("build_prompt: tool names, date slot, suffix") {
  const auto counter = datamodel::TokenCounter::approximate();
  std::vector<AgentTool> webot{{"WeBot", "web navigation agent", nullptr}};
  auto msgs = build_prompt(make_profile(AgentKind::Web), webot, {}, "book a hotel", {}, counter, 1000);
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == "system");
  CHECK(msgs[0].content.find("NEVER EVER EVER make up a plugin except [WeBot]") != std::string::npos);
  CHECK(msgs[0].content.find("> WeBot: web navigation agent") != std::string::npos);
  CHECK(msgs[1] == llm::ChatMessage{"user", "book a hotel"});

  std::tm tm{};
  tm.tm_year = 123;
  tm.tm_mon = 8;
  tm.tm_mday = 30;
  tm.tm_hour = 12;
  const auto when = std::chrono::system_clock::from_time_t(timegm(&tm));
  msgs = build_prompt(make_profile(AgentKind::Plugins), webot, {}, "q", when, counter, 1000);
  CHECK(msgs[0].content.find("Today is 2023-09-30, and you") != std::string::npos);
  CHECK(build_prompt(make_profile(AgentKind::Plugins), webot, {}, "q", when, counter, 1000) == msgs);
}

TEST_CASE("build_prompt: history over budget loses its oldest rounds") {
  const auto counter = datamodel::TokenCounter::approximate();
  datamodel::ChatHistory h;
  for (std::size_t i = 0; i < 5; ++i) {
    datamodel::Round r{i, {}};
    r.messages.push_back({datamodel::Role::User, {Artifact::text("question " + std::to_string(i) + std::string(36, '.'))}, i});
    r.messages.push_back({datamodel::Role::Assistant, {Artifact::text("answer " + std::to_string(i) + std::string(38, '.'))}, i});
    h.rounds.push_back(r);
  }
  const auto msgs = build_prompt(make_profile(AgentKind::Data), {}, h, "now", {}, counter, 50);
  std::string joined;
  for (const auto& m : msgs) joined += m.content + "\n";
  CHECK(joined.find("question 0") == std::string::npos);
  CHECK(joined.find("question 2") == std::string::npos);
  CHECK(joined.find("question 3") != std::string::npos);  // two 24-token rounds fit in 50
  CHECK(joined.find("question 4") != std::string::npos);
  CHECK(msgs.back().content == "now");
}

TEST_CASE("compose_observation") {
  const auto& tmpl = make_profile(AgentKind::Data).tool_response_template;
  auto text = compose_observation(tmpl, Observation::ok({Artifact::text("42")}), "python");
  CHECK(text.rfind("TOOL RESPONSE:\n---------------------\n42\n", 0) == 0);
  CHECK(text.find("Must be one of [python]") != std::string::npos);

  text = compose_observation(tmpl, Observation::failure(ErrorCategory::Timeout, "took too long"), "python");
  CHECK(text.find("[error: timeout] took too long") != std::string::npos);

  const auto& web = make_profile(AgentKind::Web).tool_response_template;
  text = compose_observation(web, Observation::failure(ErrorCategory::Interrupted, "stopped at step 2"), "WeBot");
  CHECK(text.find("[interrupted]") != std::string::npos);
  CHECK(text.find("interrupted by the user") != std::string::npos);

  const std::string big(10000, 'x');
  text = compose_observation(tmpl, Observation::ok({Artifact::text(big), Artifact::text(big)}), "p", 1000);
  CHECK(text.size() < tmpl.text().size() + 1100);
}

TEST_CASE("run_turn: final text only") {
  Harness h(AgentKind::Data);
  h.provider.add(scripted("data", "Hello there!"));
  datamodel::ChatHistory history;
  std::vector<parse::RoleEvent> events;
  TurnCallbacks cb;
  cb.on_event = [&](const parse::RoleEvent& e) { events.push_back(e); };
  const auto tr = run_turn(h.ctx, history, "hi", CancelToken(), cb);
  REQUIRE(tr.items.size() == 1);
  CHECK(std::get<FinalAnswer>(tr.items[0]).text == "Hello there!");
  CHECK(tr.iterations_used == 0);
  CHECK(tr.ended_by == EndedBy::FinalAnswer);
  CHECK(parse::coalesce(events).size() == 1);
  REQUIRE(history.rounds.size() == 1);
  CHECK(history.rounds[0].messages.size() == 2);
}

TEST_CASE("run_turn: one tool call then an answer") {
  Harness h(AgentKind::Plugins, {"Klarna"});
  h.provider.add(scripted("plugins", tool_call("Klarna", "shoes"), 0));
  h.provider.add(scripted("plugins", "Found shoes.", 1));
  datamodel::ChatHistory history;
  std::vector<parse::RoleEvent> events;
  int observations = 0;
  TurnCallbacks cb;
  cb.on_event = [&](const parse::RoleEvent& e) { events.push_back(e); };
  cb.on_observation = [&](const ToolCall& c, const Observation& o) {
    ++observations;
    CHECK(c == ToolCall{"Klarna", "shoes"});
    CHECK(o.status == ObservationStatus::Ok);
  };
  const auto tr = run_turn(h.ctx, history, "buy shoes", CancelToken(), cb);
  CHECK(tr.ended_by == EndedBy::FinalAnswer);
  CHECK(tr.iterations_used == 1);
  CHECK(h.dispatches == 1);
  CHECK(observations == 1);
  CHECK(event_types(parse::coalesce(events)) ==
        std::vector<std::string>{"text_delta", "action_start", "action_name", "action_input_delta", "action_end",
                                 "text_delta"});
  const auto reqs = h.provider.requests();
  REQUIRE(reqs.size() == 2);
  REQUIRE(reqs[1].messages.size() == 4);
  CHECK(reqs[1].messages[2].role == "assistant");
  CHECK(reqs[1].messages[3].content.rfind("PLUGINS RESPONSE:\n---------------------\nresult for shoes", 0) == 0);
  // user, assistant(action), observation, final
  CHECK(history.rounds.at(0).messages.size() == 4);
}

TEST_CASE("run_turn: iteration caps count executor dispatches") {
  for (auto [kind, cap, phrase] : {std::tuple{AgentKind::Data, 3, "maximum of three"},
                                   std::tuple{AgentKind::Plugins, 5, "maximum of 5"}}) {
    Harness h(kind);
    h.provider.add(scripted(std::string(to_string(kind)), tool_call("python", "again")));
    datamodel::ChatHistory history;
    std::vector<nlohmann::json> blocks;
    TurnCallbacks cb;
    cb.on_block = [&](const nlohmann::json& b) { blocks.push_back(b); };
    const auto tr = run_turn(h.ctx, history, "loop forever", CancelToken(), cb);
    CHECK(h.dispatches == cap);
    CHECK(tr.iterations_used == cap);
    CHECK(tr.ended_by == EndedBy::IterationCap);
    CHECK(std::get<FinalAnswer>(tr.items.back()).text.find(phrase) != std::string::npos);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0]["payload"]["text"].get<std::string>().find(phrase) != std::string::npos);
    CHECK(history.rounds.size() == 1);
  }
}

TEST_CASE("run_turn: unknown and malformed tool calls become observations") {
  Harness h(AgentKind::Data);
  h.provider.add(scripted("data", tool_call("nope", "x"), 0));
  h.provider.add(scripted("data", "```json\n{\"action\": \"python\", \"oops\": 1}\n```", 1));
  h.provider.add(scripted("data", "Sorry, done.", 2));
  datamodel::ChatHistory history;
  std::vector<Observation> obs;
  TurnCallbacks cb;
  cb.on_observation = [&](const ToolCall&, const Observation& o) { obs.push_back(o); };
  const auto tr = run_turn(h.ctx, history, "go", CancelToken(), cb);
  CHECK(tr.ended_by == EndedBy::FinalAnswer);
  CHECK(h.dispatches == 0);
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].artifacts[0].as<datamodel::ErrorBody>().category == ErrorCategory::UnknownTool);
  CHECK(obs[1].artifacts[0].as<datamodel::ErrorBody>().category == ErrorCategory::LlmFormatError);
  CHECK(h.provider.requests()[1].messages.back().content.find("[error: unknown_tool]") != std::string::npos);
}

TEST_CASE("run_turn: tool errors and interruption") {
  Harness h(AgentKind::Web, {});
  int runs = 0;
  h.ctx.tools.push_back({"WeBot", "web", std::make_shared<FunctionTool>([&](const ToolCall&, ToolContext&) -> Observation {
                           ++runs;
                           throw Error(ErrorCategory::Interrupted, "the user interrupted WeBot");
                         })});
  h.provider.add(scripted("web", tool_call("WeBot", "find flights"), 0));
  h.provider.add(scripted("web", tool_call("WeBot", "try again"), 1));
  datamodel::ChatHistory history;
  const auto tr = run_turn(h.ctx, history, "flights", CancelToken());
  CHECK(runs == 1);
  CHECK(tr.iterations_used == 1);
  CHECK(tr.ended_by == EndedBy::FinalAnswer);
  CHECK(std::get<Observation>(tr.items[2]).status == ObservationStatus::Interrupted);
  CHECK(h.provider.requests()[1].messages.back().content.find("[interrupted]") != std::string::npos);
}

TEST_CASE("run_turn: provider failure ends the turn with an error") {
  Harness h(AgentKind::Data);
  auto e = scripted("data", "");
  e.error = "auth_failed";
  h.provider.add(e);
  datamodel::ChatHistory history;
  std::optional<ErrorCategory> seen;
  TurnCallbacks cb;
  cb.on_error = [&](ErrorCategory c, const std::string&) { seen = c; };
  const auto tr = run_turn(h.ctx, history, "x", CancelToken(), cb);
  CHECK(tr.ended_by == EndedBy::Error);
  CHECK(seen == ErrorCategory::AuthFailed);
  CHECK(history.rounds.size() == 1);
}

TEST_CASE("property: cancelling at any event yields a prefix of the full event stream") {
  auto make = [] {
    auto h = std::make_unique<Harness>(AgentKind::Data);
    h->provider.add(scripted("data", tool_call("python", "compute"), 0, 3));
    h->provider.add(scripted("data", "The answer is 42.", 1, 3));
    return h;
  };
  std::vector<parse::RoleEvent> full;
  {
    auto h = make();
    datamodel::ChatHistory history;
    TurnCallbacks cb;
    cb.on_event = [&](const parse::RoleEvent& e) { full.push_back(e); };
    run_turn(h->ctx, history, "q", CancelToken(), cb);
  }
  for (std::size_t k = 1; k <= full.size(); ++k) {
    auto h = make();
    datamodel::ChatHistory history;
    CancelToken cancel;
    std::vector<parse::RoleEvent> got;
    TurnCallbacks cb;
    cb.on_event = [&](const parse::RoleEvent& e) {
      got.push_back(e);
      if (got.size() == k) cancel.cancel();
    };
    const auto tr = run_turn(h->ctx, history, "q", cancel, cb);
    REQUIRE(got.size() >= k);
    // finish() may flush parser state after the cancel point; everything up
    // to the cancel point matches exactly.
    for (std::size_t i = 0; i < k; ++i) CHECK(got[i] == full[i]);
    if (k < full.size()) CHECK(tr.ended_by == EndedBy::Cancelled);
    CHECK(history.rounds.size() == 1);
  }
}

TEST_CASE("property: iterations never exceed the cap over random scripts") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto kind = trial % 2 ? AgentKind::Plugins : AgentKind::Data;
    Harness h(kind);
    const std::string ch(to_string(kind));
    int tool_turns_before_final = -1;
    for (int t = 0; t < 8; ++t) {
      const bool tool = rng() % 4 != 0;
      if (!tool && tool_turns_before_final < 0) tool_turns_before_final = t;
      h.provider.add(scripted(ch, tool ? tool_call("python", "t" + std::to_string(t)) : "done", t));
    }
    datamodel::ChatHistory history;
    const auto tr = run_turn(h.ctx, history, "go", CancelToken());
    const int cap = h.ctx.profile.max_tool_iterations;
    CHECK(tr.iterations_used <= cap);
    CHECK(tr.iterations_used == h.dispatches);
    if (tr.ended_by == EndedBy::IterationCap) CHECK(tr.iterations_used == cap);
    if (tool_turns_before_final >= 0 && tool_turns_before_final <= cap)
      CHECK(tr.iterations_used == tool_turns_before_final);
    CHECK(history.rounds.size() == 1);
  }
}
