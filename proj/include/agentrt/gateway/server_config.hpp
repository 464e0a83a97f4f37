#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>

#include "agentrt/exec/sandbox.hpp"
#include "agentrt/llm/config.hpp"

namespace agentrt::gateway {

// Server configuration file (JSON). Every key is optional:
//   {"listen": "127.0.0.1:8080",
//    "data_dir": "./agentrt-data",          store/ and files/ go here
//    "catalog_dir": "./plugins",
//    "upload_cap_mb": 32, "auto_k": 3, "history_budget": 3000,
//    "llm": {...},                          see load_llm_config
//    "embedder": {"kind": "hashing"} | {"kind": "remote", "base_url", "model", "key_env"},
//    "web": {"socket": "/run/browser.sock", "sites_dir": "...", "start_url": "..."},
//    "datasets": {"fixture": "datasets.json"} | {"base_url", "username_env", "key_env"},
//    "sandbox": {"wall_clock_s": 30, "memory_mb": 1024, "output_cap_kb": 64, "interpreter": "python3"}}
// Relative paths resolve against the config file's directory.
struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "agentrt-data";
  std::filesystem::path catalog_dir;
  std::uint64_t upload_cap = 32ull << 20;
  std::size_t auto_k = 3;
  std::size_t history_budget = 3000;
  llm::LlmConfig llm;

  std::string embedder_kind = "hashing";
  std::string embedder_base_url, embedder_model, embedder_key_env;

  std::string browser_socket;
  std::filesystem::path sites_dir;
  std::string start_url;

  std::filesystem::path datasets_fixture;
  std::string datasets_base_url, datasets_username_env, datasets_key_env;

  exec::SandboxLimits limits;
  std::string interpreter = "python3";
};

// Throws InvalidArgument on a malformed value.
ServerConfig parse_server_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ServerConfig load_server_config(const std::filesystem::path& path);

// "host:port", ":port" or "port".
void apply_listen(ServerConfig& c, const std::string& listen);

}  // namespace agentrt::gateway
