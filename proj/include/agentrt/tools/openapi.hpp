#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "agentrt/tools/descriptor.hpp"

namespace agentrt::tools {

// Parses JSON or YAML text into a JSON value. Throws SpecParseError whose
// detail starts with "line N:".
nlohmann::json parse_document(const std::string& text);

// Builds an OpenApiPlugin descriptor from an OpenAPI 3.x document.
// Endpoints are ordered by path, then method, in byte order.
// Path-item and operation parameters are merged, local $refs resolved, and a
// JSON request body's properties become Body parameters. Operations whose
// security requirements only name unsupported schemes (oauth2,
// openIdConnect, mutualTLS) are kept but disabled.
ToolDescriptor ingest_openapi(const std::string& document, const std::string& name, const std::string& description);
ToolDescriptor ingest_openapi_json(const nlohmann::json& document, const std::string& name,
                              const std::string& description);

}  // namespace agentrt::tools
