#include "agentrt/tools/descriptor.hpp"

#include "agentrt/core/error.hpp"

namespace agentrt::tools {

std::string_view to_string(ParamLocation l) {
  switch (l) {
    case ParamLocation::Path: return "path";
    case ParamLocation::Query: return "query";
    case ParamLocation::Header: return "header";
    case ParamLocation::Body: return "body";
  }
  return "query";
}

std::string_view to_string(ToolKind k) {
  switch (k) {
    case ToolKind::Builtin: return "builtin";
    case ToolKind::OpenApiPlugin: return "openapi_plugin";
    case ToolKind::WebBot: return "web_bot";
  }
  return "builtin";
}

std::vector<std::string> EndpointSpec::path_params() const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = url_template.find('{', i)) != std::string::npos) {
    const auto j = url_template.find('}', i);
    if (j == std::string::npos) break;
    out.push_back(url_template.substr(i + 1, j - i - 1));
    i = j + 1;
  }
  return out;
}

nlohmann::json EndpointSpec::to_prompt_json() const {
  nlohmann::json params = nlohmann::json::object();
  const auto& props = param_schema.value("properties", nlohmann::json::object());
  for (const auto& [k, v] : props.items()) {
    nlohmann::json p = nlohmann::json::object();
    if (v.contains("type")) p["type"] = v["type"];
    if (v.contains("description")) p["description"] = v["description"];
    if (v.contains("enum")) p["enum"] = v["enum"];
    auto loc = locations.find(k);
    if (loc != locations.end()) p["in"] = to_string(loc->second);
    params[k] = p;
  }
  return {{"endpoint", operation_id},
          {"method", method},
          {"path", url_template},
          {"summary", summary},
          {"parameters", params},
          {"required", param_schema.value("required", nlohmann::json::array())}};
}

void ToolDescriptor::validate() const {
  if (name.empty()) throw Error(ErrorCategory::InvalidArgument, "tool name is empty");
  if (description.empty()) throw Error(ErrorCategory::InvalidArgument, "tool " + name + " has no description");
  if (kind == ToolKind::OpenApiPlugin && !spec)
    throw Error(ErrorCategory::InvalidArgument, "plugin " + name + " has no OpenAPI spec");
}

std::vector<const EndpointSpec*> ToolDescriptor::enabled_endpoints() const {
  std::vector<const EndpointSpec*> out;
  for (const auto& e : endpoints)
    if (e.enabled) out.push_back(&e);
  return out;
}

const EndpointSpec* ToolDescriptor::endpoint(const std::string& operation_id) const {
  for (const auto& e : endpoints)
    if (e.operation_id == operation_id) return &e;
  return nullptr;
}

bool same_content(const ToolDescriptor& a, const ToolDescriptor& b) {
  return a.name == b.name && a.description == b.description && a.kind == b.kind && a.spec == b.spec &&
         a.base_url == b.base_url && a.auth == b.auth && a.enabled == b.enabled;
}

}  // namespace agentrt::tools
