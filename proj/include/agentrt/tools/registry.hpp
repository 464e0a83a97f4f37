#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "agentrt/tools/descriptor.hpp"
#include "agentrt/tools/embedder.hpp"

namespace agentrt::tools {

// Descriptor catalog. Readers take an immutable snapshot; writers replace it
// under a lock.
class ToolRegistry {
 public:
  using Snapshot = std::shared_ptr<const std::vector<ToolDescriptor>>;

  ToolRegistry();

  // Adds a descriptor. Adding one identical to an existing entry is a no-op;
  // a different descriptor under an existing name throws DuplicateName.
  void add(ToolDescriptor d);
  // Adds or replaces.
  void upsert(ToolDescriptor d);
  bool remove(const std::string& name);

  Snapshot snapshot() const;
  std::vector<ToolDescriptor> enabled() const;
  // Throws NotFound.
  ToolDescriptor get(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::size_t size() const { return snapshot()->size(); }

  // Loads every plugin folder under dir (manifest.json plus openapi.json,
  // openapi.yaml or openapi.yml) and upserts them. Returns the loaded names.
  std::vector<std::string> load_catalog_dir(const std::filesystem::path& dir);

 private:
  mutable std::mutex write_mu_;
  mutable std::shared_mutex snap_mu_;
  Snapshot snap_;
};

// Unit-normalized description embeddings keyed by (embedder id, text),
// filled on first use. Thread-safe.
class EmbeddingCache {
 public:
  Vector get(Embedder& embedder, const std::string& text);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, Vector> cache_;
};

struct ScoredTool {
  std::string name;
  double score = 0;
};

// Ranks enabled descriptors by cosine similarity between the instruction and
// each description; ties (scores equal to 1e-9) break by name ascending.
// Returns min(k, enabled count) entries. Throws InvalidArgument when k < 1
// or no descriptor is enabled; EmbedderUnavailable propagates.
std::vector<ScoredTool> auto_select(const std::string& instruction, const std::vector<ToolDescriptor>& catalog,
                                    std::size_t k, Embedder& embedder, EmbeddingCache* cache = nullptr);

inline constexpr double kAutoSelectThreshold = 0.1;

// auto_select with k results, keeping only scores >= threshold.
std::vector<ScoredTool> auto_select_above(const std::string& instruction, const std::vector<ToolDescriptor>& catalog,
                                          std::size_t k, Embedder& embedder, EmbeddingCache* cache = nullptr,
                                          double threshold = kAutoSelectThreshold);

// n builtin descriptors named tool_000... with templated descriptions,
// deterministic for a given seed.
std::vector<ToolDescriptor> synthetic_catalog(std::size_t n = 200, std::uint64_t seed = 42);

}  // namespace agentrt::tools
