#include "agentrt/llm/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>

#include "agentrt/core/error.hpp"
#include "agentrt/core/text.hpp"

namespace agentrt::llm {

LlmConfig parse_llm_config(const std::string& json_text) {
  LlmConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCategory::InvalidArgument, "config must be a JSON object");
  c.model_id = j.value("model_id", c.model_id);
  c.base_url = j.value("base_url", c.base_url);
  c.keys = j.value("keys", std::vector<std::string>{});
  if (j.contains("keys_env")) {
    if (const char* v = std::getenv(j["keys_env"].get<std::string>().c_str())) {
      std::string s = v;
      std::size_t start = 0;
      while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        std::string k(text::trim(std::string_view(s).substr(start, comma - start)));
        if (!k.empty()) c.keys.push_back(k);
        start = comma + 1;
      }
    }
  }
  if (j.contains("timeout_s"))
    c.timeout = std::chrono::milliseconds(static_cast<long>(j["timeout_s"].get<double>() * 1000));
  if (j.contains("cooldown_s"))
    c.cooldown = std::chrono::milliseconds(static_cast<long>(j["cooldown_s"].get<double>() * 1000));
  c.counter_mode = j.value("counter", c.counter_mode);
  c.chars_per_token = j.value("chars_per_token", c.chars_per_token);
  if (c.timeout.count() <= 0) throw Error(ErrorCategory::InvalidArgument, "timeout_s must be positive");
  if (c.chars_per_token <= 0) throw Error(ErrorCategory::InvalidArgument, "chars_per_token must be positive");
  return c;
}

LlmConfig load_llm_config(const std::string& path) { return parse_llm_config(text::read_file(path)); }

}  // namespace agentrt::llm
