#include "agentrt/gateway/server_config.hpp"

#include "agentrt/core/error.hpp"
#include "agentrt/core/text.hpp"

namespace agentrt::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCategory::InvalidArgument, std::string("config: bad value for \"") + key + "\"");
  }
}

}  // namespace

void apply_listen(ServerConfig& c, const std::string& listen) {
  const auto colon = listen.rfind(':');
  std::string port = listen;
  if (colon != std::string::npos) {
    if (colon > 0) c.host = listen.substr(0, colon);
    port = listen.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    c.port = std::stoi(port, &used);
    if (used != port.size() || c.port < 0 || c.port > 65535) throw std::invalid_argument(port);
  } catch (const std::exception&) {
    throw Error(ErrorCategory::InvalidArgument, "bad listen address '" + listen + "'");
  }
}

ServerConfig parse_server_config(const json& j, const fs::path& base) {
  if (!j.is_object()) throw Error(ErrorCategory::InvalidArgument, "config must be a JSON object");
  ServerConfig c;
  if (j.contains("listen")) apply_listen(c, get_or<std::string>(j, "listen", ""));
  if (j.contains("data_dir")) c.data_dir = resolve(base, get_or<std::string>(j, "data_dir", ""));
  c.catalog_dir = resolve(base, get_or<std::string>(j, "catalog_dir", ""));
  c.upload_cap = get_or<std::uint64_t>(j, "upload_cap_mb", 32) << 20;
  c.auto_k = get_or<std::size_t>(j, "auto_k", 3);
  c.history_budget = get_or<std::size_t>(j, "history_budget", 3000);
  if (j.contains("llm")) c.llm = llm::parse_llm_config(j["llm"].dump());

  const json e = j.value("embedder", json::object());
  c.embedder_kind = get_or<std::string>(e, "kind", "hashing");
  if (c.embedder_kind != "hashing" && c.embedder_kind != "remote")
    throw Error(ErrorCategory::InvalidArgument, "config: embedder kind must be hashing or remote");
  c.embedder_base_url = get_or<std::string>(e, "base_url", "");
  c.embedder_model = get_or<std::string>(e, "model", "");
  c.embedder_key_env = get_or<std::string>(e, "key_env", "");

  const json w = j.value("web", json::object());
  c.browser_socket = get_or<std::string>(w, "socket", "");
  c.sites_dir = resolve(base, get_or<std::string>(w, "sites_dir", ""));
  c.start_url = get_or<std::string>(w, "start_url", "");

  const json d = j.value("datasets", json::object());
  c.datasets_fixture = resolve(base, get_or<std::string>(d, "fixture", ""));
  c.datasets_base_url = get_or<std::string>(d, "base_url", "");
  c.datasets_username_env = get_or<std::string>(d, "username_env", "");
  c.datasets_key_env = get_or<std::string>(d, "key_env", "");

  const json s = j.value("sandbox", json::object());
  c.limits.wall_clock = std::chrono::seconds(get_or<int>(s, "wall_clock_s", 30));
  c.limits.memory = get_or<std::uint64_t>(s, "memory_mb", 1024) << 20;
  c.limits.output_cap = get_or<std::uint64_t>(s, "output_cap_kb", 64) << 10;
  c.interpreter = get_or<std::string>(s, "interpreter", "python3");
  c.limits.validate();
  return c;
}

ServerConfig load_server_config(const fs::path& path) {
  const json j = json::parse(text::read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCategory::InvalidArgument, path.string() + " is not valid JSON");
  return parse_server_config(j, path.parent_path());
}

}  // namespace agentrt::gateway
