#include "agentrt/datamodel/render.hpp"

#include "agentrt/core/text.hpp"

namespace agentrt::datamodel {

std::string_view to_string(BlockType type) {
  switch (type) {
    case BlockType::Markdown: return "markdown";
    case BlockType::Code: return "code";
    case BlockType::Table: return "table";
    case BlockType::Image: return "image";
    case BlockType::Chart: return "chart";
    case BlockType::Console: return "console";
    case BlockType::Error: return "error";
    case BlockType::Card: return "card";
  }
  return "markdown";
}

BlockType block_type_for(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::Text: return BlockType::Markdown;
    case ArtifactKind::Code: return BlockType::Code;
    case ArtifactKind::Table: return BlockType::Table;
    case ArtifactKind::Image: return BlockType::Image;
    case ArtifactKind::FileRef:
    case ArtifactKind::DatabaseRef: return BlockType::Card;
    case ArtifactKind::ChartSpec: return BlockType::Chart;
    case ArtifactKind::ConsoleOutput: return BlockType::Console;
    case ArtifactKind::Error: return BlockType::Error;
  }
  return BlockType::Markdown;
}

nlohmann::json render_frontend(const Artifact& a) {
  nlohmann::json payload;
  switch (a.kind()) {
    case ArtifactKind::Text:
    case ArtifactKind::ConsoleOutput:
      payload = {{"text", a.as<TextBody>().text}};
      break;
    case ArtifactKind::Code:
      payload = {{"language", a.as<CodeBody>().language}, {"source", a.as<CodeBody>().source}};
      break;
    case ArtifactKind::Table:
      payload = {{"columns", a.as<Table>().columns}, {"rows", a.as<Table>().rows}};
      break;
    case ArtifactKind::Image: {
      const auto& blob = a.as<BlobRef>();
      payload = {{"uri", blob.uri}, {"mime", a.mime().value_or("")}, {"size", blob.size}};
      payload["data_url"] = blob.data ? nlohmann::json("data:" + a.mime().value_or("application/octet-stream") +
                                                       ";base64," + text::base64_encode(*blob.data))
                                      : nlohmann::json(nullptr);
      break;
    }
    case ArtifactKind::FileRef:
    case ArtifactKind::DatabaseRef: {
      const auto& blob = a.as<BlobRef>();
      payload = {{"title", a.name().value_or(blob.uri)},
                 {"uri", blob.uri},
                 {"size", blob.size},
                 {"mime", a.mime() ? nlohmann::json(*a.mime()) : nlohmann::json(nullptr)},
                 {"kind", to_string(a.kind())}};
      break;
    }
    case ArtifactKind::ChartSpec:
      payload = a.as<ChartBody>().spec;
      break;
    case ArtifactKind::Error:
      payload = {{"category", to_string(a.as<ErrorBody>().category)}, {"message", a.as<ErrorBody>().message}};
      break;
  }
  return {{"block_type", to_string(block_type_for(a.kind()))},
          {"payload", std::move(payload)},
          {"name", a.name() ? nlohmann::json(*a.name()) : nlohmann::json(nullptr)}};
}

}  // namespace agentrt::datamodel
