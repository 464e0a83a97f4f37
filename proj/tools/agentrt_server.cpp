// The agent platform's HTTP service.
//   agentrt-server [--config path] [--listen host:port]
//                  [--scripted-provider dir] [--log-level info]
//
// With --scripted-provider every *.json fixture in the directory is loaded
// into one scripted provider and the server runs fully offline: fixed clock,
// sequential session ids, hashing embedder, and (when present) the
// directory's sites/ corpus for WeBot and datasets.json for dataset search.

#include <CLI11.hpp>
#include <httplib.h>
#include <signal.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "agentrt/core/text.hpp"
#include "agentrt/gateway/server_config.hpp"
#include "agentrt/gateway/service.hpp"
#include "agentrt/llm/http_provider.hpp"
#include "agentrt/llm/key_pool.hpp"
#include "agentrt/llm/scripted_provider.hpp"
#include "agentrt/web/remote_driver.hpp"
#include "agentrt/web/simulator.hpp"

using namespace agentrt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return "";
  const char* v = std::getenv(name.c_str());
  return v ? v : "";
}

json load_scripts(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json" && e.path().filename() != "datasets.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  json merged = {{"entries", json::array()}};
  for (const auto& f : files) {
    const json j = json::parse(text::read_file(f));
    for (const auto& entry : j.value("entries", json::array())) merged["entries"].push_back(entry);
  }
  spdlog::info("scripted provider: {} entries from {} files", merged["entries"].size(), files.size());
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language-agent platform server"};
  std::string config_path, listen, scripted, log_level = "info";
  app.add_option("--config", config_path, "server configuration file (JSON)")->check(CLI::ExistingFile);
  app.add_option("--listen", listen, "address to listen on, host:port");
  app.add_option("--scripted-provider", scripted, "fixture directory; runs offline")->check(CLI::ExistingDirectory);
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  // SIGINT/SIGTERM are taken by a waiter thread so shutdown can drain turns.
  sigset_t sigs;
  sigemptyset(&sigs);
  sigaddset(&sigs, SIGINT);
  sigaddset(&sigs, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &sigs, nullptr);
  signal(SIGPIPE, SIG_IGN);

  try {
    gateway::ServerConfig cfg = config_path.empty() ? gateway::ServerConfig{} : gateway::load_server_config(config_path);
    if (!listen.empty()) gateway::apply_listen(cfg, listen);
    const bool offline = !scripted.empty();

    std::unique_ptr<llm::Provider> provider;
    std::vector<std::string> keys = cfg.llm.keys;
    if (offline) {
      provider.reset(new llm::ScriptedProvider(llm::ScriptedProvider::from_json(load_scripts(scripted))));
      if (keys.empty()) keys = {"offline"};
      if (cfg.sites_dir.empty() && fs::exists(fs::path(scripted) / "sites")) cfg.sites_dir = fs::path(scripted) / "sites";
      if (cfg.datasets_fixture.empty() && fs::exists(fs::path(scripted) / "datasets.json"))
        cfg.datasets_fixture = fs::path(scripted) / "datasets.json";
    } else {
      if (keys.empty()) throw Error(ErrorCategory::InvalidArgument, "no provider keys configured (llm.keys or llm.keys_env)");
      provider = std::make_unique<llm::HttpProvider>(cfg.llm.base_url);
    }
    llm::KeyPool pool(keys, cfg.llm.cooldown);

    gateway::GatewayDeps deps;
    deps.llm = llm::LlmClient{provider.get(), &pool, cfg.llm.model_id, cfg.llm.timeout, 0.0, 1024};
    deps.registry = std::make_shared<tools::ToolRegistry>();
    if (cfg.embedder_kind == "remote")
      deps.embedder = std::make_shared<tools::RemoteEmbedder>(cfg.embedder_base_url, cfg.embedder_model,
                                                               env_or_empty(cfg.embedder_key_env));
    else
      deps.embedder = std::make_shared<tools::HashingEmbedder>();
    fs::create_directories(cfg.data_dir);
    deps.documents = std::make_shared<store::FileDocumentStore>(cfg.data_dir / "store");
    deps.kv = std::make_shared<store::MemoryKVStore>();
    deps.data.limits = cfg.limits;
    deps.data.sandbox.interpreter = cfg.interpreter;
    if (!cfg.datasets_fixture.empty())
      deps.data.datasets =
          std::make_shared<exec::FixtureDatasetClient>(exec::FixtureDatasetClient::from_file(cfg.datasets_fixture));
    else if (!cfg.datasets_base_url.empty())
      deps.data.datasets = std::make_shared<exec::HttpDatasetClient>(
          cfg.datasets_base_url, env_or_empty(cfg.datasets_username_env), env_or_empty(cfg.datasets_key_env));
    if (!cfg.browser_socket.empty()) {
      const std::string sock = cfg.browser_socket;
      deps.browser = [sock] { return std::make_shared<web::RemoteDriver>(sock); };
    } else if (!cfg.sites_dir.empty()) {
      const auto corpus = web::SiteCorpus::load_dir(cfg.sites_dir);
      deps.browser = [corpus] { return std::make_shared<web::SimulatorDriver>(corpus); };
    }
    if (offline) {
      deps.clock = [] { return datamodel::Timestamp(std::chrono::sys_days(std::chrono::year{2026} / 1 / 1)); };
      deps.next_session_id = store::sequential_ids("sess-");
    }

    gateway::GatewayOptions opts;
    opts.files_dir = cfg.data_dir / "files";
    opts.catalog_dir = cfg.catalog_dir;
    opts.upload_cap = cfg.upload_cap;
    opts.auto_k = cfg.auto_k;
    opts.history_budget = cfg.history_budget;
    opts.default_start_url = cfg.start_url;

    gateway::Gateway gw(std::move(deps), opts);
    httplib::Server server;
    gw.mount(server);

    std::thread waiter([&] {
      int sig = 0;
      sigwait(&sigs, &sig);
      spdlog::info("signal {}: draining turns", sig);
      gw.shutdown(std::chrono::seconds(10));
      server.stop();
    });

    spdlog::info("listening on {}:{}{}", cfg.host, cfg.port, offline ? " (offline)" : "");
    const bool ok = server.listen(cfg.host, cfg.port);
    if (!ok) {
      spdlog::error("cannot listen on {}:{}", cfg.host, cfg.port);
      kill(getpid(), SIGTERM);  // release the waiter
    }
    waiter.join();
    return ok ? 0 : 1;
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.category()), e.detail());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
}
