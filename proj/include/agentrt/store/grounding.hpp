#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentrt/datamodel/artifact.hpp"

namespace agentrt::store {

inline constexpr std::uint64_t kDefaultUploadCap = 32ull << 20;

struct GroundingEntry {
  std::string key;
  datamodel::Artifact artifact;
  // Raw upload on disk; what executors bind into their workspace.
  std::filesystem::path path;
};

// "a.csv" -> "a-2.csv", "data" -> "data-2". Exposed for tests.
std::string suffixed_name(const std::string& name, int n);

// Per-session uploaded files keyed by file name. Not synchronized: a
// session has a single writer during a turn.
class GroundingPool {
 public:
  // Returns the key actually used: `name`, else the first free suffix.
  std::string add(const std::string& name, datamodel::Artifact artifact, std::filesystem::path path = {});
  const GroundingEntry* find(const std::string& key) const;
  bool contains(const std::string& key) const { return find(key) != nullptr; }
  std::vector<std::string> keys() const;  // upload order
  const std::vector<GroundingEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<GroundingEntry> entries_;
};

struct UploadOptions {
  std::uint64_t cap = kDefaultUploadCap;
  // Where raw bytes are kept; empty keeps nothing on disk.
  std::filesystem::path files_dir;
};

struct UploadResult {
  std::string key;
  datamodel::Artifact artifact;
  // Set when the content could not be read as its apparent type and was
  // kept as a plain file reference instead.
  std::optional<std::string> warning;
};

// Sniffs the bytes: SQLite header -> DatabaseRef; PNG/JPEG/GIF/WebP ->
// Image; CSV or JSON lines (by extension or declared mime) -> Table;
// anything else -> FileRef. Throws TooLarge above the cap.
UploadResult upload_file(GroundingPool& pool, const std::string& name, const std::string& bytes,
                         const std::string& declared_mime, const UploadOptions& opts = {});

// Image mime type from magic bytes, if any.
std::optional<std::string> sniff_image(const std::string& bytes);
bool is_sqlite(const std::string& bytes);

}  // namespace agentrt::store
