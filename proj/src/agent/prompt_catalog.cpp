#include "agentrt/agent/prompt_catalog.hpp"

#include <nlohmann/json.hpp>

#include "agentrt/core/error.hpp"
#include "agentrt/core/text.hpp"

namespace agentrt::agent {

PromptCatalog PromptCatalog::load(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path))
    throw Error(ErrorCategory::NotFound, "prompt manifest missing: " + manifest_path.string());
  const auto manifest = nlohmann::json::parse(text::read_file(manifest_path));
  PromptCatalog c;
  for (const auto& [file, digest] : manifest.items()) {
    const auto path = dir / file;
    if (!std::filesystem::exists(path)) throw Error(ErrorCategory::NotFound, "prompt file missing: " + file);
    auto body = text::read_file(path);
    if (text::sha256_hex(body) != digest.get<std::string>())
      throw Error(ErrorCategory::Internal, "prompt checksum mismatch: " + file);
    // Files end with one newline that is not part of the prompt.
    if (!body.empty() && body.back() == '\n') body.pop_back();
    c.prompts_.emplace(std::filesystem::path(file).stem().string(), std::move(body));
  }
  return c;
}

const PromptCatalog& PromptCatalog::builtin() {
  static const PromptCatalog catalog = load(AGENTRT_PROMPT_DIR);
  return catalog;
}

const std::string& PromptCatalog::get(const std::string& name) const {
  auto it = prompts_.find(name);
  if (it == prompts_.end()) throw Error(ErrorCategory::NotFound, "no prompt named " + name);
  return it->second;
}

}  // namespace agentrt::agent
