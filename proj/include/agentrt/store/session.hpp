#pragma once

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "agentrt/agent/profile.hpp"
#include "agentrt/datamodel/history.hpp"
#include "agentrt/store/document_store.hpp"
#include "agentrt/store/grounding.hpp"

namespace agentrt::store {

// Either an explicit tool list or "auto" (the registry picks per turn).
struct ToolSelection {
  bool automatic = false;
  std::vector<std::string> names;

  static ToolSelection auto_select() { return {true, {}}; }
  bool operator==(const ToolSelection&) const = default;
};

void to_json(nlohmann::json& j, const ToolSelection& s);
void from_json(const nlohmann::json& j, ToolSelection& s);

struct Session {
  std::string id;
  std::string user_id;
  agent::AgentKind profile = agent::AgentKind::Data;
  ToolSelection selected_tools;
  datamodel::ChatHistory history;
  GroundingPool grounding;
  std::string created_at;  // ISO timestamp
};

inline constexpr const char* kSessionsCollection = "sessions";
inline constexpr const char* kRoundsCollection = "rounds";

// The session document: everything but the history, which is stored one
// document per round.
Document session_document(const Session& s);
Document round_document(const Session& s, const datamodel::Round& r);

// Rebuilds a session from its documents; nullopt if unknown.
std::optional<Session> load_session(DocumentStore& store, const std::string& session_id);
// The user's sessions in creation order (history included).
std::vector<Session> load_user_sessions(DocumentStore& store, const std::string& user_id);

// Writes documents in order. A write that hits StoreUnavailable stays
// queued (with everything after it) and is retried in the background;
// health() reports the backlog until it drains.
class Persistence {
 public:
  struct Ack {
    bool durable = false;  // written before returning
    std::optional<std::string> error;
  };
  struct Health {
    bool ok = true;
    std::size_t pending = 0;
    std::optional<std::string> last_error;
  };

  explicit Persistence(DocumentStore& store, std::chrono::milliseconds retry_every = std::chrono::milliseconds(500),
                       bool background = true);
  ~Persistence();
  Persistence(const Persistence&) = delete;
  Persistence& operator=(const Persistence&) = delete;

  Ack persist_session(const Session& s);
  Ack persist_round(const Session& s, const datamodel::Round& r);
  Ack persist(Document doc);

  // Tries to drain the backlog now; true when nothing is left.
  bool retry_now();
  Health health() const;

 private:
  bool drain_locked();
  void worker();

  DocumentStore& store_;
  std::chrono::milliseconds retry_every_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Document> queue_;
  std::optional<std::string> last_error_;
  bool stop_ = false;
  std::thread thread_;
};

// Synchronized map of live sessions. Each session carries its own turn
// mutex; whoever holds it is the session's single writer.
class SessionRegistry {
 public:
  struct Live {
    Session session;
    std::mutex turn;
  };

  // Default ids are random 16-hex-digit strings prefixed "s_".
  explicit SessionRegistry(std::function<std::string()> next_id = {});

  std::shared_ptr<Live> create(const std::string& user_id, agent::AgentKind profile, ToolSelection tools,
                               std::string created_at);
  std::shared_ptr<Live> find(const std::string& id) const;
  // Inserts a session restored from storage; replaces nothing.
  std::shared_ptr<Live> adopt(Session s);
  bool erase(const std::string& id);
  std::vector<std::string> ids() const;
  std::size_t size() const;

 private:
  std::function<std::string()> next_id_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
};

// Sequential ids ("<prefix>1", "<prefix>2", ...) for offline runs.
std::function<std::string()> sequential_ids(std::string prefix);

}  // namespace agentrt::store
