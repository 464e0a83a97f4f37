#pragma once

#include <nlohmann/json.hpp>

#include <string_view>

#include "agentrt/datamodel/artifact.hpp"

namespace agentrt::datamodel {

// Frontend block types, in the wire spelling.
enum class BlockType { Markdown, Code, Table, Image, Chart, Console, Error, Card };

std::string_view to_string(BlockType type);
BlockType block_type_for(ArtifactKind kind);

// {"block_type": ..., "payload": {...}, "name": string|null}. Total over all
// artifact kinds; serializing the result and parsing it back is lossless.
nlohmann::json render_frontend(const Artifact& artifact);

}  // namespace agentrt::datamodel
