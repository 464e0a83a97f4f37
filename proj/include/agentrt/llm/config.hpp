#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace agentrt::llm {

struct LlmConfig {
  std::string model_id = "gpt-3.5-turbo";
  std::string base_url = "https://api.openai.com/v1";
  std::vector<std::string> keys;
  std::chrono::milliseconds timeout = std::chrono::seconds(60);
  std::chrono::milliseconds cooldown = std::chrono::seconds(10);
  // "approximate" or the id of a registered tokenizer.
  std::string counter_mode = "approximate";
  double chars_per_token = 4.0;
};

// Reads a JSON config file:
//   {"model_id": "...", "base_url": "...", "keys": ["..."],
//    "keys_env": "VAR", "timeout_s": 60, "cooldown_s": 10,
//    "counter": "approximate", "chars_per_token": 4}
// "keys_env" names an environment variable holding comma-separated keys that
// are appended to "keys".
LlmConfig load_llm_config(const std::string& path);
LlmConfig parse_llm_config(const std::string& json_text);

}  // namespace agentrt::llm
