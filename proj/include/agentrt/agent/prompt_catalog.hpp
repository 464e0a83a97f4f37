#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace agentrt::agent {

// The shipped prompt texts, one UTF-8 file per prompt plus manifest.json
// mapping file name to SHA-256. Loading verifies every checksum so that an
// edited prompt is caught before it reaches a model.
class PromptCatalog {
 public:
  // Throws NotFound for a missing file and Internal on a checksum mismatch.
  static PromptCatalog load(const std::filesystem::path& dir);
  // The catalog installed with the library.
  static const PromptCatalog& builtin();

  // Prompt by name without extension, e.g. "data_system". Throws NotFound.
  const std::string& get(const std::string& name) const;
  bool contains(const std::string& name) const { return prompts_.count(name) != 0; }
  const std::map<std::string, std::string>& all() const { return prompts_; }

 private:
  std::map<std::string, std::string> prompts_;
};

}  // namespace agentrt::agent
