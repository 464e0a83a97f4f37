#include "agentrt/datamodel/artifact.hpp"

#include <array>
#include <utility>

#include "agentrt/core/text.hpp"

namespace agentrt::datamodel {
namespace {

constexpr std::array<std::pair<ArtifactKind, std::string_view>, 9> kKindNames{{
    {ArtifactKind::Text, "text"},
    {ArtifactKind::Code, "code"},
    {ArtifactKind::Table, "table"},
    {ArtifactKind::Image, "image"},
    {ArtifactKind::FileRef, "file_ref"},
    {ArtifactKind::DatabaseRef, "database_ref"},
    {ArtifactKind::ChartSpec, "chart_spec"},
    {ArtifactKind::ConsoleOutput, "console_output"},
    {ArtifactKind::Error, "error"},
}};

}  // namespace

std::string_view to_string(ArtifactKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  return "text";
}

ArtifactKind artifact_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw Error(ErrorCategory::InvalidArgument, "unknown artifact kind: " + std::string(name));
}

Artifact::Artifact(ArtifactKind kind, Payload payload, std::optional<std::string> name,
                   std::optional<std::string> mime)
    : kind_(kind), payload_(std::move(payload)), name_(std::move(name)), mime_(std::move(mime)) {}

Artifact Artifact::text(std::string body, std::optional<std::string> name) {
  return {ArtifactKind::Text, TextBody{std::move(body)}, std::move(name), "text/markdown"};
}

Artifact Artifact::code(std::string language, std::string source, std::optional<std::string> name) {
  return {ArtifactKind::Code, CodeBody{std::move(language), std::move(source)}, std::move(name),
          std::nullopt};
}

Artifact Artifact::table(Table table, std::optional<std::string> name) {
  table.validate();
  return {ArtifactKind::Table, std::move(table), std::move(name), "text/csv"};
}

Artifact Artifact::image(BlobRef blob, std::string mime, std::optional<std::string> name) {
  return {ArtifactKind::Image, std::move(blob), std::move(name), std::move(mime)};
}

Artifact Artifact::file_ref(BlobRef blob, std::optional<std::string> mime, std::optional<std::string> name) {
  return {ArtifactKind::FileRef, std::move(blob), std::move(name), std::move(mime)};
}

Artifact Artifact::database_ref(BlobRef blob, std::optional<std::string> name) {
  return {ArtifactKind::DatabaseRef, std::move(blob), std::move(name), "application/vnd.sqlite3"};
}

Artifact Artifact::chart(nlohmann::json spec, std::optional<std::string> name) {
  if (!spec.is_object()) throw Error(ErrorCategory::InvalidArgument, "chart spec must be a JSON object");
  return {ArtifactKind::ChartSpec, ChartBody{std::move(spec)}, std::move(name), "application/json"};
}

Artifact Artifact::console(std::string output, std::optional<std::string> name) {
  return {ArtifactKind::ConsoleOutput, TextBody{std::move(output)}, std::move(name), "text/plain"};
}

Artifact Artifact::error(ErrorCategory category, std::string message) {
  return {ArtifactKind::Error, ErrorBody{category, std::move(message)}, std::nullopt, std::nullopt};
}

Artifact Artifact::with_id(ArtifactId id, Timestamp created_at) const {
  Artifact copy = *this;
  copy.id_ = id;
  copy.created_at_ = created_at;
  return copy;
}

Artifact Artifact::with_name(std::string name) const {
  Artifact copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

void to_json(nlohmann::json& j, const Artifact& a) {
  j = nlohmann::json::object();
  j["id"] = a.id_.value;
  j["kind"] = to_string(a.kind_);
  j["name"] = a.name_ ? nlohmann::json(*a.name_) : nlohmann::json(nullptr);
  j["mime"] = a.mime_ ? nlohmann::json(*a.mime_) : nlohmann::json(nullptr);
  j["created_at"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(a.created_at_.time_since_epoch()).count();
  nlohmann::json p;
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, TextBody>) {
          p = {{"text", body.text}};
        } else if constexpr (std::is_same_v<T, CodeBody>) {
          p = {{"language", body.language}, {"source", body.source}};
        } else if constexpr (std::is_same_v<T, Table>) {
          p = {{"columns", body.columns}, {"rows", body.rows}};
        } else if constexpr (std::is_same_v<T, BlobRef>) {
          p = {{"uri", body.uri}, {"size", body.size}};
          p["data_base64"] = body.data ? nlohmann::json(text::base64_encode(*body.data)) : nlohmann::json(nullptr);
        } else if constexpr (std::is_same_v<T, ChartBody>) {
          p = {{"spec", body.spec}};
        } else if constexpr (std::is_same_v<T, ErrorBody>) {
          p = {{"category", to_string(body.category)}, {"message", body.message}};
        }
      },
      a.payload_);
  j["payload"] = std::move(p);
}

void from_json(const nlohmann::json& j, Artifact& a) {
  a.id_ = ArtifactId{j.at("id").get<std::uint64_t>()};
  a.kind_ = artifact_kind_from_string(j.at("kind").get<std::string>());
  a.name_ = j.at("name").is_null() ? std::nullopt : std::optional(j.at("name").get<std::string>());
  a.mime_ = j.at("mime").is_null() ? std::nullopt : std::optional(j.at("mime").get<std::string>());
  a.created_at_ = Timestamp(std::chrono::milliseconds(j.at("created_at").get<std::int64_t>()));
  const auto& p = j.at("payload");
  switch (a.kind_) {
    case ArtifactKind::Text:
    case ArtifactKind::ConsoleOutput:
      a.payload_ = TextBody{p.at("text").get<std::string>()};
      break;
    case ArtifactKind::Code:
      a.payload_ = CodeBody{p.at("language").get<std::string>(), p.at("source").get<std::string>()};
      break;
    case ArtifactKind::Table: {
      Table t;
      t.columns = p.at("columns").get<std::vector<std::string>>();
      t.rows = p.at("rows").get<std::vector<std::vector<Cell>>>();
      t.validate();
      a.payload_ = std::move(t);
      break;
    }
    case ArtifactKind::Image:
    case ArtifactKind::FileRef:
    case ArtifactKind::DatabaseRef: {
      BlobRef b{p.at("uri").get<std::string>(), p.at("size").get<std::uint64_t>(), std::nullopt};
      if (!p.at("data_base64").is_null()) b.data = text::base64_decode(p.at("data_base64").get<std::string>());
      a.payload_ = std::move(b);
      break;
    }
    case ArtifactKind::ChartSpec:
      a.payload_ = ChartBody{p.at("spec")};
      break;
    case ArtifactKind::Error:
      a.payload_ = ErrorBody{error_category_from_string(p.at("category").get<std::string>()),
                             p.at("message").get<std::string>()};
      break;
  }
}

}  // namespace agentrt::datamodel
