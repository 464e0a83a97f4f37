#include "agentrt/store/grounding.hpp"

#include <algorithm>

#include "agentrt/core/error.hpp"
#include "agentrt/core/text.hpp"
#include "agentrt/datamodel/table.hpp"

namespace agentrt::store {

namespace fs = std::filesystem;
using datamodel::Artifact;
using datamodel::BlobRef;

std::string suffixed_name(const std::string& name, int n) {
  const fs::path p(name);
  const std::string ext = p.extension().string();
  const std::string stem = name.substr(0, name.size() - ext.size());
  return stem + "-" + std::to_string(n) + ext;
}

std::string GroundingPool::add(const std::string& name, Artifact artifact, fs::path path) {
  std::string key = name;
  for (int n = 2; contains(key); ++n) key = suffixed_name(name, n);
  entries_.push_back(GroundingEntry{key, std::move(artifact).with_name(key), std::move(path)});
  return key;
}

const GroundingEntry* GroundingPool::find(const std::string& key) const {
  const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.key == key; });
  return it == entries_.end() ? nullptr : &*it;
}

std::vector<std::string> GroundingPool::keys() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.key);
  return out;
}

std::optional<std::string> sniff_image(const std::string& b) {
  auto starts = [&](std::string_view magic) { return b.compare(0, magic.size(), magic) == 0; };
  if (starts("\x89PNG\r\n\x1a\n")) return "image/png";
  if (starts("\xff\xd8\xff")) return "image/jpeg";
  if (starts("GIF87a") || starts("GIF89a")) return "image/gif";
  if (b.size() >= 12 && starts("RIFF") && b.compare(8, 4, "WEBP") == 0) return "image/webp";
  return std::nullopt;
}

bool is_sqlite(const std::string& b) { return b.compare(0, 16, std::string_view("SQLite format 3\0", 16)) == 0; }

namespace {

enum class TextKind { None, Csv, JsonLines };

TextKind text_kind(const std::string& name, const std::string& mime) {
  const std::string ext = text::to_lower(fs::path(name).extension().string());
  const std::string m = text::to_lower(mime);
  if (ext == ".csv" || m == "text/csv" || m == "application/csv") return TextKind::Csv;
  if (ext == ".jsonl" || ext == ".ndjson" || m == "application/x-ndjson" || m == "application/jsonl" ||
      m == "application/x-jsonlines")
    return TextKind::JsonLines;
  return TextKind::None;
}

}  // namespace

UploadResult upload_file(GroundingPool& pool, const std::string& name, const std::string& bytes,
                         const std::string& declared_mime, const UploadOptions& opts) {
  if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..")
    throw Error(ErrorCategory::InvalidArgument, "bad file name: '" + name + "'");
  if (bytes.size() > opts.cap)
    throw Error(ErrorCategory::TooLarge,
                name + " is " + std::to_string(bytes.size()) + " bytes; the limit is " + std::to_string(opts.cap));

  // Reserve the key first so the on-disk name matches it.
  std::string key = name;
  for (int n = 2; pool.contains(key); ++n) key = suffixed_name(name, n);
  const std::string uri = "grounding://" + key;
  BlobRef blob{uri, bytes.size(), std::nullopt};

  std::optional<std::string> warning;
  Artifact artifact;
  if (is_sqlite(bytes)) {
    artifact = Artifact::database_ref(blob);
  } else if (auto image = sniff_image(bytes)) {
    blob.data = bytes;
    artifact = Artifact::image(blob, *image);
  } else if (const auto kind = text_kind(name, declared_mime); kind != TextKind::None) {
    try {
      artifact = Artifact::table(kind == TextKind::Csv ? datamodel::parse_csv(bytes)
                                                       : datamodel::parse_json_lines(bytes));
    } catch (const Error& e) {
      warning = name + " could not be read as a table (" + e.detail() + "); kept as a file";
      artifact = Artifact::file_ref(blob, declared_mime.empty() ? std::nullopt : std::optional(declared_mime));
    } catch (const std::exception& e) {
      warning = name + " could not be read as a table (" + e.what() + "); kept as a file";
      artifact = Artifact::file_ref(blob, declared_mime.empty() ? std::nullopt : std::optional(declared_mime));
    }
  } else {
    artifact = Artifact::file_ref(blob, declared_mime.empty() ? std::nullopt : std::optional(declared_mime));
  }

  fs::path path;
  if (!opts.files_dir.empty()) {
    std::error_code ec;
    fs::create_directories(opts.files_dir, ec);
    path = opts.files_dir / key;
    text::write_file(path, bytes);
  }
  const std::string used = pool.add(key, artifact, path);
  return UploadResult{used, pool.find(used)->artifact, warning};
}

}  // namespace agentrt::store
