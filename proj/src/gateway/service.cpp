#include "agentrt/gateway/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>

#include "agentrt/api/executor.hpp"
#include "agentrt/core/text.hpp"
#include "agentrt/datamodel/render.hpp"
#include "agentrt/web/web_task.hpp"

namespace agentrt::gateway {

using nlohmann::json;
using datamodel::Artifact;

nlohmann::json error_body(ErrorCategory category, const std::string& message) {
  return {{"error", {{"category", std::string(to_string(category))}, {"message", message}}}};
}

int http_status_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::InvalidArgument:
    case ErrorCategory::UnknownTool:
    case ErrorCategory::SpecParseError:
    case ErrorCategory::SpecInvalid:
    case ErrorCategory::DuplicateName:
      return 400;
    case ErrorCategory::NotFound: return 404;
    case ErrorCategory::TooLarge: return 413;
    case ErrorCategory::StoreUnavailable:
    case ErrorCategory::EmbedderUnavailable:
      return 503;
    default: return 500;
  }
}

namespace {

Reply fail(ErrorCategory c, const std::string& msg) { return Reply{http_status_for(c), error_body(c, msg)}; }
Reply busy() { return Reply{409, error_body(ErrorCategory::InvalidArgument, "a turn is in progress for this session")}; }
Reply unknown_session(const std::string& id) { return fail(ErrorCategory::NotFound, "no session '" + id + "'"); }

store::ToolSelection default_tools(agent::AgentKind kind) {
  switch (kind) {
    case agent::AgentKind::Data: return {false, data_tool_names()};
    case agent::AgentKind::Plugins: return store::ToolSelection::auto_select();
    case agent::AgentKind::Web: return {false, {kWebBotTool}};
  }
  return {};
}

// Which descriptors "auto" may choose from for a profile.
bool fits_profile(const tools::ToolDescriptor& d, agent::AgentKind kind) {
  switch (kind) {
    case agent::AgentKind::Data: return d.kind == tools::ToolKind::Builtin;
    case agent::AgentKind::Plugins: return d.kind == tools::ToolKind::OpenApiPlugin;
    case agent::AgentKind::Web: return d.kind == tools::ToolKind::WebBot;
  }
  return false;
}

std::uint64_t max_artifact_id(const datamodel::ChatHistory& h) {
  std::uint64_t m = 0;
  for (const auto& r : h.rounds)
    for (const auto& msg : r.messages)
      for (const auto& a : msg.blocks) m = std::max(m, a.id().value);
  return m;
}

Artifact preview_of(const Artifact& a) {
  if (a.kind() != datamodel::ArtifactKind::Table) return a;
  datamodel::Table t = a.as<datamodel::Table>();
  if (t.rows.size() > 5) t.rows.resize(5);
  return Artifact::table(std::move(t), a.name());
}

}  // namespace

Gateway::Gateway(GatewayDeps deps, GatewayOptions opts)
    : deps_(std::move(deps)),
      opts_(std::move(opts)),
      persistence_(std::make_unique<store::Persistence>(*deps_.documents, opts_.persistence_retry)),
      sessions_(deps_.next_session_id) {
  if (!deps_.registry) deps_.registry = std::make_shared<tools::ToolRegistry>();
  if (!deps_.kv) deps_.kv = std::make_shared<store::MemoryKVStore>();
  for (auto& d : builtin_descriptors()) deps_.registry->upsert(std::move(d));
  if (!opts_.catalog_dir.empty() && std::filesystem::exists(opts_.catalog_dir)) {
    const auto names = deps_.registry->load_catalog_dir(opts_.catalog_dir);
    spdlog::info("loaded {} plugins from {}", names.size(), opts_.catalog_dir.string());
  }
}

Gateway::~Gateway() { shutdown(std::chrono::seconds(5)); }

std::shared_ptr<Gateway::Slot> Gateway::slot(const std::string& session_id) {
  std::lock_guard lock(slots_mu_);
  if (const auto it = slots_.find(session_id); it != slots_.end()) return it->second;
  auto live = sessions_.find(session_id);
  if (!live) {
    auto restored = store::load_session(*deps_.documents, session_id);
    if (!restored) return nullptr;
    live = sessions_.adopt(std::move(*restored));
  }
  auto s = std::make_shared<Slot>();
  s->live = live;
  s->next_artifact_id = max_artifact_id(live->session.history) + 1;
  slots_[session_id] = s;
  return s;
}

Reply Gateway::create_session(const json& body) {
  if (!body.is_object()) return fail(ErrorCategory::InvalidArgument, "expected a JSON object");
  const std::string profile = body.value("profile", "");
  agent::AgentKind kind;
  try {
    kind = agent::agent_kind_from_string(profile);
  } catch (const Error& e) {
    return fail(ErrorCategory::InvalidArgument, e.detail());
  }
  const auto user = body.contains("user_id") && body["user_id"].is_string() ? body["user_id"].get<std::string>()
                                                                            : std::string("anonymous");
  auto live = sessions_.create(user, kind, default_tools(kind), text::format_timestamp(deps_.clock()));
  {
    std::lock_guard lock(slots_mu_);
    auto s = std::make_shared<Slot>();
    s->live = live;
    slots_[live->session.id] = s;
  }
  const auto ack = persistence_->persist_session(live->session);
  if (!ack.durable) spdlog::warn("session {} not yet persisted: {}", live->session.id, ack.error.value_or(""));
  return Reply{201, {{"session_id", live->session.id}}};
}

Gateway::Admission Gateway::admit_turn(const std::string& session_id) {
  const auto s = slot(session_id);
  if (!s) return Admission::NotFound;
  std::lock_guard lock(s->mu);
  if (s->busy || shutting_down_) return Admission::Busy;
  s->busy = true;
  s->stop_requested = false;
  s->cancel = CancelToken();
  {
    std::lock_guard tl(turns_mu_);
    ++turns_in_flight_;
  }
  return Admission::Admitted;
}

void Gateway::finish_turn(Slot& s) {
  std::lock_guard lock(s.mu);
  s.busy = false;
}

void Gateway::abandon_turn(const std::string& session_id) {
  if (const auto s = slot(session_id)) finish_turn(*s);
  std::lock_guard tl(turns_mu_);
  --turns_in_flight_;
  turns_cv_.notify_all();
}

std::vector<agent::AgentTool> Gateway::tools_for_turn(Slot& slot, const std::string& input) {
  const store::Session& session = slot.live->session;
  std::vector<std::string> names;
  if (session.selected_tools.automatic) {
    std::vector<tools::ToolDescriptor> candidates;
    for (auto& d : deps_.registry->enabled())
      if (fits_profile(d, session.profile)) candidates.push_back(std::move(d));
    if (!candidates.empty()) {
      if (deps_.embedder) {
        for (const auto& st : tools::auto_select_above(input, candidates, opts_.auto_k, *deps_.embedder, &embeddings_))
          names.push_back(st.name);
      } else {
        for (std::size_t i = 0; i < candidates.size() && i < opts_.auto_k; ++i) names.push_back(candidates[i].name);
      }
    }
  } else {
    names = session.selected_tools.names;
  }

  std::vector<agent::AgentTool> out;
  for (const auto& name : names) {
    if (!deps_.registry->contains(name)) {
      spdlog::warn("session {}: selected tool '{}' is no longer registered", session.id, name);
      continue;
    }
    const auto d = deps_.registry->get(name);
    std::shared_ptr<agent::ToolExecutor> executor;
    switch (d.kind) {
      case tools::ToolKind::OpenApiPlugin: executor = std::make_shared<api::ApiPluginTool>(d, deps_.llm); break;
      case tools::ToolKind::WebBot:
        if (deps_.browser) {
          web::WebBotConfig cfg;
          cfg.task.clock = deps_.clock;
          cfg.default_start_url = opts_.default_start_url;
          executor = std::make_shared<web::WebBotTool>(deps_.browser(), deps_.llm, cfg);
        }
        break;
      case tools::ToolKind::Builtin: executor = make_data_tool(name, session, deps_.llm, deps_.data); break;
    }
    if (executor) out.push_back({d.name, d.description, executor});
  }
  return out;
}

void Gateway::run_turn(const std::string& session_id, const std::string& text,
                       const std::function<bool(const std::string&)>& write) {
  const auto s = slot(session_id);
  CancelToken cancel;
  {
    std::lock_guard lock(s->mu);
    cancel = s->cancel;
  }
  std::uint64_t seq = 0;
  bool gone = false;
  auto emit = [&](Frame f) {
    if (gone) return;
    // After a stop only the closing done frame goes out.
    if (cancel.cancelled() && f.event != FrameEvent::Done) return;
    f.seq = ++seq;
    if (!write(encode_sse(f))) {
      gone = true;
      cancel.cancel();
    }
  };

  store::Session& session = s->live->session;
  std::string ended_by = "error";
  try {
    agent::AgentContext ctx;
    ctx.profile = agent::make_profile(session.profile);
    ctx.tools = tools_for_turn(*s, text);
    ctx.llm = deps_.llm;
    ctx.history_budget = opts_.history_budget;
    ctx.clock = deps_.clock;
    ctx.stamp = [&](const Artifact& a) { return a.with_id({s->next_artifact_id++}, deps_.clock()); };

    agent::TurnCallbacks cb;
    cb.on_event = [&](const parse::RoleEvent& e) {
      if (auto f = frame_for(e)) emit(std::move(*f));
    };
    cb.on_observation = [&](const agent::ToolCall& call, const agent::Observation& obs) {
      emit(observation_frame(call, obs));
    };
    cb.on_block = [&](const json& block) { emit(block_frame(block)); };
    cb.on_error = [&](ErrorCategory c, const std::string& msg) { emit(error_frame(c, msg)); };

    const auto tr = agent::run_turn(ctx, session.history, text, cancel, cb);
    ended_by = std::string(agent::to_string(tr.ended_by));
    const auto ack = persistence_->persist_round(session, session.history.rounds.back());
    if (!ack.durable)
      spdlog::warn("session {}: round {} queued for persistence: {}", session.id,
                   session.history.rounds.back().index, ack.error.value_or(""));
  } catch (const Error& e) {
    emit(error_frame(e.category(), e.detail()));
    ended_by = cancel.cancelled() ? "cancelled" : "error";
  } catch (const std::exception& e) {
    emit(error_frame(ErrorCategory::Internal, e.what()));
  }
  finish_turn(*s);
  emit(done_frame(ended_by));
  std::lock_guard tl(turns_mu_);
  --turns_in_flight_;
  turns_cv_.notify_all();
}

Reply Gateway::stop(const std::string& session_id) {
  const auto s = slot(session_id);
  if (!s) return unknown_session(session_id);
  std::lock_guard lock(s->mu);
  if (!s->busy || s->stop_requested || s->cancel.cancelled()) return Reply{200, {{"stopped", false}}};
  s->stop_requested = true;
  s->cancel.cancel();
  return Reply{200, {{"stopped", true}}};
}

Reply Gateway::list_tools() const {
  json tools = json::array();
  for (const auto& d : deps_.registry->enabled())
    tools.push_back({{"name", d.name}, {"description", d.description}, {"kind", std::string(tools::to_string(d.kind))}});
  return Reply{200, {{"tools", tools}}};
}

Reply Gateway::set_tools(const std::string& session_id, const json& body) {
  const auto s = slot(session_id);
  if (!s) return unknown_session(session_id);
  json value = body;
  if (body.is_object()) value = body.contains("names") ? body["names"] : body.value("tools", json());
  store::ToolSelection sel;
  try {
    sel = value.get<store::ToolSelection>();
  } catch (const Error& e) {
    return fail(ErrorCategory::InvalidArgument, e.detail());
  } catch (const json::exception&) {
    return fail(ErrorCategory::InvalidArgument, "tools must be \"auto\" or a list of names");
  }
  for (const auto& n : sel.names)
    if (!deps_.registry->contains(n)) return fail(ErrorCategory::InvalidArgument, "unknown tool '" + n + "'");
  {
    std::lock_guard lock(s->mu);
    if (s->busy) return busy();
    s->live->session.selected_tools = sel;
  }
  persistence_->persist_session(s->live->session);
  return Reply{200, {{"selected", sel}}};
}

Reply Gateway::upload(const std::string& session_id, const std::string& filename, const std::string& content,
                      const std::string& content_type) {
  const auto s = slot(session_id);
  if (!s) return unknown_session(session_id);
  {
    std::lock_guard lock(s->mu);
    if (s->busy) return busy();
    s->busy = true;
  }
  Reply reply;
  try {
    store::UploadOptions uo;
    uo.cap = opts_.upload_cap;
    if (!opts_.files_dir.empty()) uo.files_dir = opts_.files_dir / session_id;
    const auto r = store::upload_file(s->live->session.grounding, filename, content, content_type, uo);
    json body = {{"name", r.key},
                 {"kind", std::string(datamodel::to_string(r.artifact.kind()))},
                 {"preview", datamodel::render_frontend(preview_of(r.artifact))}};
    if (r.warning) body["warning"] = *r.warning;
    reply = Reply{201, body};
  } catch (const Error& e) {
    reply = fail(e.category(), e.detail());
  }
  finish_turn(*s);
  if (reply.status == 201) persistence_->persist_session(s->live->session);
  return reply;
}

Reply Gateway::history(const std::string& session_id) {
  const auto s = slot(session_id);
  if (!s) return unknown_session(session_id);
  std::lock_guard lock(s->mu);
  if (s->busy) return busy();
  const auto& ses = s->live->session;
  return Reply{200,
               {{"session_id", ses.id},
                {"user_id", ses.user_id},
                {"profile", std::string(agent::to_string(ses.profile))},
                {"selected_tools", ses.selected_tools},
                {"grounding", ses.grounding.keys()},
                {"history", ses.history}}};
}

Reply Gateway::health() const {
  const auto h = persistence_->health();
  std::size_t sessions = 0;
  {
    std::lock_guard lock(slots_mu_);
    sessions = slots_.size();
  }
  return Reply{200,
               {{"status", h.ok ? "ok" : "degraded"},
                {"store", {{"pending", h.pending}, {"last_error", h.last_error ? json(*h.last_error) : json()}}},
                {"sessions", sessions},
                {"tools", deps_.registry->size()}}};
}

Reply Gateway::reload_catalog() {
  if (opts_.catalog_dir.empty()) return fail(ErrorCategory::InvalidArgument, "no catalog directory is configured");
  try {
    const auto names = deps_.registry->load_catalog_dir(opts_.catalog_dir);
    const auto prev = deps_.kv->get("catalog:version");
    const std::string version = std::to_string(prev ? std::stoull(*prev) + 1 : 1);
    deps_.kv->set("catalog:version", version);
    spdlog::info("catalog reloaded: {} plugins, version {}", names.size(), version);
    return Reply{200, {{"loaded", names}, {"version", std::stoull(version)}}};
  } catch (const Error& e) {
    return fail(e.category(), e.detail());
  }
}

void Gateway::shutdown(std::chrono::milliseconds wait) {
  shutting_down_ = true;
  {
    std::lock_guard lock(slots_mu_);
    for (auto& [id, s] : slots_) {
      std::lock_guard sl(s->mu);
      if (s->busy) s->cancel.cancel();
    }
  }
  std::unique_lock tl(turns_mu_);
  turns_cv_.wait_for(tl, wait, [this] { return turns_in_flight_ == 0; });
}

// ---- HTTP -----------------------------------------------------------------

namespace {

void send(httplib::Response& res, const Reply& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) {
    send(res, fail(ErrorCategory::InvalidArgument, "request body is not valid JSON"));
    return std::nullopt;
  }
  return j;
}

template <class F>
auto guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send(res, fail(e.category(), e.detail()));
    } catch (const std::exception& e) {
      send(res, fail(ErrorCategory::Internal, e.what()));
    }
  };
}

}  // namespace

void Gateway::mount(httplib::Server& server) {
  server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, create_session(*body));
  }));

  server.Post(R"(/sessions/([^/]+)/messages)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto body = parse_body(req, res);
    if (!body) return;
    if (!body->is_object() || !body->contains("text") || !(*body)["text"].is_string()) {
      send(res, fail(ErrorCategory::InvalidArgument, "expected {\"text\": string}"));
      return;
    }
    const std::string text = (*body)["text"];
    switch (admit_turn(id)) {
      case Admission::NotFound: send(res, unknown_session(id)); return;
      case Admission::Busy: send(res, busy()); return;
      case Admission::Admitted: break;
    }
    auto started = std::make_shared<std::atomic<bool>>(false);
    res.status = 200;
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, id, text, started](std::size_t, httplib::DataSink& sink) {
          started->store(true);
          run_turn(id, text, [&](const std::string& frame) { return sink.write(frame.data(), frame.size()); });
          sink.done();
          return true;
        },
        [this, id, started](bool) {
          if (!started->exchange(true)) abandon_turn(id);
        });
  }));

  server.Post(R"(/sessions/([^/]+)/stop)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send(res, stop(req.matches[1]));
  }));

  server.Get("/tools", guarded([this](const httplib::Request&, httplib::Response& res) { send(res, list_tools()); }));

  server.Put(R"(/sessions/([^/]+)/tools)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, set_tools(req.matches[1], *body));
  }));

  server.Post(R"(/sessions/([^/]+)/files)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data() || !req.has_file("file")) {
      send(res, fail(ErrorCategory::InvalidArgument, "expected a multipart form with a \"file\" field"));
      return;
    }
    const auto f = req.get_file_value("file");
    send(res, upload(req.matches[1], f.filename, f.content, f.content_type));
  }));

  server.Get(R"(/sessions/([^/]+)/history)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send(res, history(req.matches[1]));
  }));

  server.Get("/healthz", guarded([this](const httplib::Request&, httplib::Response& res) { send(res, health()); }));

  server.Post("/admin/reload-catalog", guarded([this](const httplib::Request&, httplib::Response& res) {
    send(res, reload_catalog());
  }));
}

}  // namespace agentrt::gateway
