#include "agentrt/store/session.hpp"

#include <algorithm>
#include <random>

#include "agentrt/core/error.hpp"

namespace agentrt::store {

using nlohmann::json;

void to_json(json& j, const ToolSelection& s) {
  if (s.automatic)
    j = "auto";
  else
    j = s.names;
}

void from_json(const json& j, ToolSelection& s) {
  if (j.is_string() && j.get<std::string>() == "auto") {
    s = ToolSelection::auto_select();
    return;
  }
  if (!j.is_array()) throw Error(ErrorCategory::InvalidArgument, "tools must be \"auto\" or a list of names");
  s.automatic = false;
  s.names.clear();
  for (const auto& n : j) {
    if (!n.is_string()) throw Error(ErrorCategory::InvalidArgument, "tool names must be strings");
    s.names.push_back(n.get<std::string>());
  }
}

Document session_document(const Session& s) {
  json grounding = json::array();
  for (const auto& e : s.grounding.entries())
    grounding.push_back({{"key", e.key}, {"artifact", e.artifact}, {"path", e.path.string()}});
  json body = {{"id", s.id},
               {"user_id", s.user_id},
               {"profile", agent::to_string(s.profile)},
               {"selected_tools", s.selected_tools},
               {"created_at", s.created_at},
               {"grounding", grounding}};
  return Document{kSessionsCollection, s.id, s.user_id, std::move(body)};
}

Document round_document(const Session& s, const datamodel::Round& r) {
  return Document{kRoundsCollection, s.id + "/" + std::to_string(r.index), s.user_id,
                  json{{"session_id", s.id}, {"round", r}}};
}

namespace {

Session session_from(const Document& d) {
  Session s;
  const json& b = d.body;
  s.id = b.at("id").get<std::string>();
  s.user_id = b.at("user_id").get<std::string>();
  s.profile = agent::agent_kind_from_string(b.at("profile").get<std::string>());
  s.selected_tools = b.at("selected_tools").get<ToolSelection>();
  s.created_at = b.value("created_at", "");
  for (const auto& g : b.value("grounding", json::array()))
    s.grounding.add(g.at("key").get<std::string>(), g.at("artifact").get<datamodel::Artifact>(),
                    g.value("path", ""));
  return s;
}

void attach_rounds(Session& s, const std::vector<Document>& rounds) {
  std::vector<datamodel::Round> mine;
  for (const auto& d : rounds)
    if (d.body.value("session_id", "") == s.id) mine.push_back(d.body.at("round").get<datamodel::Round>());
  std::sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  s.history.rounds = std::move(mine);
}

}  // namespace

std::optional<Session> load_session(DocumentStore& store, const std::string& session_id) {
  const auto doc = store.get(kSessionsCollection, session_id);
  if (!doc) return std::nullopt;
  Session s = session_from(*doc);
  attach_rounds(s, store.query_by_user(kRoundsCollection, s.user_id));
  return s;
}

std::vector<Session> load_user_sessions(DocumentStore& store, const std::string& user_id) {
  const auto rounds = store.query_by_user(kRoundsCollection, user_id);
  std::vector<Session> out;
  for (const auto& d : store.query_by_user(kSessionsCollection, user_id)) {
    Session s = session_from(d);
    attach_rounds(s, rounds);
    out.push_back(std::move(s));
  }
  return out;
}

// ---- persistence ----------------------------------------------------------

Persistence::Persistence(DocumentStore& store, std::chrono::milliseconds retry_every, bool background)
    : store_(store), retry_every_(retry_every) {
  if (background) thread_ = std::thread([this] { worker(); });
}

Persistence::~Persistence() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

bool Persistence::drain_locked() {
  while (!queue_.empty()) {
    try {
      store_.put(queue_.front());
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::StoreUnavailable) throw;
      last_error_ = e.detail();
      return false;
    }
    queue_.pop_front();
  }
  last_error_.reset();
  return true;
}

Persistence::Ack Persistence::persist(Document doc) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(doc));
  const bool ok = drain_locked();
  if (!ok) cv_.notify_all();
  return Ack{ok, ok ? std::nullopt : last_error_};
}

Persistence::Ack Persistence::persist_session(const Session& s) { return persist(session_document(s)); }

Persistence::Ack Persistence::persist_round(const Session& s, const datamodel::Round& r) {
  return persist(round_document(s, r));
}

bool Persistence::retry_now() {
  std::lock_guard lock(mu_);
  return drain_locked();
}

Persistence::Health Persistence::health() const {
  std::lock_guard lock(mu_);
  return Health{queue_.empty(), queue_.size(), last_error_};
}

void Persistence::worker() {
  std::unique_lock lock(mu_);
  while (!stop_) {
    cv_.wait_for(lock, retry_every_, [this] { return stop_; });
    if (stop_) break;
    if (!queue_.empty()) drain_locked();
  }
}

// ---- registry -------------------------------------------------------------

std::function<std::string()> sequential_ids(std::string prefix) {
  auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
  return [prefix = std::move(prefix), counter] { return prefix + std::to_string(++*counter); };
}

SessionRegistry::SessionRegistry(std::function<std::string()> next_id) : next_id_(std::move(next_id)) {
  if (!next_id_) {
    next_id_ = [] {
      static std::mutex m;
      static std::mt19937_64 rng{std::random_device{}()};
      std::lock_guard lock(m);
      char buf[19];
      std::snprintf(buf, sizeof buf, "s_%016llx", static_cast<unsigned long long>(rng()));
      return std::string(buf);
    };
  }
}

std::shared_ptr<SessionRegistry::Live> SessionRegistry::create(const std::string& user_id, agent::AgentKind profile,
                                                               ToolSelection tools, std::string created_at) {
  auto live = std::make_shared<Live>();
  live->session.user_id = user_id;
  live->session.profile = profile;
  live->session.selected_tools = std::move(tools);
  live->session.created_at = std::move(created_at);
  std::lock_guard lock(mu_);
  std::string id;
  do id = next_id_();
  while (sessions_.count(id));
  live->session.id = id;
  sessions_[id] = live;
  return live;
}

std::shared_ptr<SessionRegistry::Live> SessionRegistry::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<SessionRegistry::Live> SessionRegistry::adopt(Session s) {
  std::lock_guard lock(mu_);
  if (const auto it = sessions_.find(s.id); it != sessions_.end()) return it->second;
  auto live = std::make_shared<Live>();
  live->session = std::move(s);
  sessions_[live->session.id] = live;
  return live;
}

bool SessionRegistry::erase(const std::string& id) {
  std::lock_guard lock(mu_);
  return sessions_.erase(id) > 0;
}

std::vector<std::string> SessionRegistry::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::size_t SessionRegistry::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace agentrt::store
