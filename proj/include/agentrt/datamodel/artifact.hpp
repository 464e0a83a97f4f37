#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "agentrt/core/error.hpp"
#include "agentrt/datamodel/table.hpp"

namespace agentrt::datamodel {

using Timestamp = std::chrono::system_clock::time_point;

// Session-scoped, monotonically assigned. Zero means "not yet assigned".
struct ArtifactId {
  std::uint64_t value = 0;
  bool operator==(const ArtifactId&) const = default;
  auto operator<=>(const ArtifactId&) const = default;
};

enum class ArtifactKind {
  Text,
  Code,
  Table,
  Image,
  FileRef,
  DatabaseRef,
  ChartSpec,
  ConsoleOutput,
  Error,
};

std::string_view to_string(ArtifactKind kind);
ArtifactKind artifact_kind_from_string(std::string_view name);

struct TextBody {
  std::string text;
  bool operator==(const TextBody&) const = default;
};

struct CodeBody {
  std::string language;
  std::string source;
  bool operator==(const CodeBody&) const = default;
};

// Reference to binary content. `data` is carried inline when the bytes are
// small enough to travel with the artifact (uploads, sandbox outputs).
struct BlobRef {
  std::string uri;
  std::uint64_t size = 0;
  std::optional<std::string> data;
  bool operator==(const BlobRef&) const = default;
};

struct ChartBody {
  nlohmann::json spec;
  bool operator==(const ChartBody&) const = default;
};

struct ErrorBody {
  ErrorCategory category = ErrorCategory::Internal;
  std::string message;
  bool operator==(const ErrorBody&) const = default;
};

using Payload = std::variant<TextBody, CodeBody, Table, BlobRef, ChartBody, ErrorBody>;

// A typed unit of content with per-target renderings (see linearize.hpp and
// render.hpp). Construct through the named factories, which enforce the
// kind/payload pairing.
class Artifact {
 public:
  static Artifact text(std::string body, std::optional<std::string> name = std::nullopt);
  static Artifact code(std::string language, std::string source,
                       std::optional<std::string> name = std::nullopt);
  static Artifact table(Table table, std::optional<std::string> name = std::nullopt);
  static Artifact image(BlobRef blob, std::string mime, std::optional<std::string> name = std::nullopt);
  static Artifact file_ref(BlobRef blob, std::optional<std::string> mime = std::nullopt,
                           std::optional<std::string> name = std::nullopt);
  static Artifact database_ref(BlobRef blob, std::optional<std::string> name = std::nullopt);
  // Throws InvalidArgument unless `spec` is a JSON object.
  static Artifact chart(nlohmann::json spec, std::optional<std::string> name = std::nullopt);
  static Artifact console(std::string output, std::optional<std::string> name = std::nullopt);
  static Artifact error(ErrorCategory category, std::string message);

  ArtifactId id() const { return id_; }
  ArtifactKind kind() const { return kind_; }
  const Payload& payload() const { return payload_; }
  const std::optional<std::string>& name() const { return name_; }
  const std::optional<std::string>& mime() const { return mime_; }
  Timestamp created_at() const { return created_at_; }

  Artifact with_id(ArtifactId id, Timestamp created_at) const;
  Artifact with_name(std::string name) const;

  template <class T>
  const T& as() const { return std::get<T>(payload_); }

  bool operator==(const Artifact&) const = default;

  friend void to_json(nlohmann::json& j, const Artifact& a);
  friend void from_json(const nlohmann::json& j, Artifact& a);

  Artifact() = default;

 private:
  Artifact(ArtifactKind kind, Payload payload, std::optional<std::string> name,
           std::optional<std::string> mime);

  ArtifactId id_{};
  ArtifactKind kind_ = ArtifactKind::Text;
  Payload payload_ = TextBody{};
  std::optional<std::string> name_;
  std::optional<std::string> mime_;
  Timestamp created_at_{};
};

}  // namespace agentrt::datamodel
