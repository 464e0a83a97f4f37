#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "agentrt/agent/loop.hpp"
#include "agentrt/gateway/data_tools.hpp"
#include "agentrt/gateway/frames.hpp"
#include "agentrt/llm/client.hpp"
#include "agentrt/store/document_store.hpp"
#include "agentrt/store/kv.hpp"
#include "agentrt/store/session.hpp"
#include "agentrt/tools/embedder.hpp"
#include "agentrt/tools/registry.hpp"
#include "agentrt/web/driver.hpp"

namespace httplib {
class Server;
}

namespace agentrt::gateway {

struct GatewayOptions {
  // Uploaded files live under <files_dir>/<session id>/.
  std::filesystem::path files_dir;
  // Plugin folders loaded at start and by POST /admin/reload-catalog.
  std::filesystem::path catalog_dir;
  std::uint64_t upload_cap = store::kDefaultUploadCap;
  // Tools chosen per turn when a session's selection is "auto".
  std::size_t auto_k = 3;
  std::size_t history_budget = 3000;
  std::string default_start_url;
  std::chrono::milliseconds persistence_retry = std::chrono::milliseconds(500);
};

struct GatewayDeps {
  llm::LlmClient llm;
  std::shared_ptr<tools::ToolRegistry> registry;
  std::shared_ptr<tools::Embedder> embedder;
  std::shared_ptr<store::DocumentStore> documents;
  std::shared_ptr<store::KVStore> kv;
  DataToolDeps data;
  // A fresh browser for each WeBot call; null disables WeBot.
  std::function<std::shared_ptr<web::BrowserDriver>()> browser;
  std::function<datamodel::Timestamp()> clock = [] { return std::chrono::system_clock::now(); };
  // Session ids; empty uses random ids.
  std::function<std::string()> next_session_id;
};

// HTTP status plus JSON body.
struct Reply {
  int status = 200;
  nlohmann::json body;
};

class Gateway {
 public:
  Gateway(GatewayDeps deps, GatewayOptions opts);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Registers every endpoint on the server.
  void mount(httplib::Server& server);

  // Cancels in-flight turns and waits up to `wait` for them to send done.
  void shutdown(std::chrono::milliseconds wait = std::chrono::seconds(5));

  // Transport-independent operations behind the endpoints.
  Reply create_session(const nlohmann::json& body);
  Reply stop(const std::string& session_id);
  Reply list_tools() const;
  Reply set_tools(const std::string& session_id, const nlohmann::json& body);
  Reply upload(const std::string& session_id, const std::string& filename, const std::string& content,
               const std::string& content_type);
  Reply history(const std::string& session_id);
  Reply health() const;
  Reply reload_catalog();

  enum class Admission { Admitted, NotFound, Busy };
  // Claims the session for a turn. Admitted turns must be run with
  // run_turn (which releases the claim) or released with abandon_turn.
  Admission admit_turn(const std::string& session_id);
  // Streams one turn. `write` gets each encoded frame; returning false
  // (client gone) cancels the turn.
  void run_turn(const std::string& session_id, const std::string& text,
                const std::function<bool(const std::string&)>& write);
  void abandon_turn(const std::string& session_id);

  store::Persistence& persistence() { return *persistence_; }
  tools::ToolRegistry& registry() { return *deps_.registry; }

 private:
  struct Slot {
    std::shared_ptr<store::SessionRegistry::Live> live;
    std::mutex mu;
    bool busy = false;
    bool stop_requested = false;
    CancelToken cancel;
    std::uint64_t next_artifact_id = 1;
  };

  std::shared_ptr<Slot> slot(const std::string& session_id);
  std::vector<agent::AgentTool> tools_for_turn(Slot& slot, const std::string& input);
  void finish_turn(Slot& slot);

  GatewayDeps deps_;
  GatewayOptions opts_;
  std::unique_ptr<store::Persistence> persistence_;
  store::SessionRegistry sessions_;
  tools::EmbeddingCache embeddings_;

  mutable std::mutex slots_mu_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;

  std::mutex turns_mu_;
  std::condition_variable turns_cv_;
  std::size_t turns_in_flight_ = 0;
  std::atomic<bool> shutting_down_{false};
};

// JSON body for an error: {"error": {"category", "message"}}.
nlohmann::json error_body(ErrorCategory category, const std::string& message);
int http_status_for(ErrorCategory category);

}  // namespace agentrt::gateway
