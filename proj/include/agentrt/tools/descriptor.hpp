#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agentrt::tools {

enum class ParamLocation { Path, Query, Header, Body };

std::string_view to_string(ParamLocation l);

struct EndpointSpec {
  std::string operation_id;
  std::string method;  // upper case
  std::string url_template;
  // JSON-schema object: {"type":"object","properties":{...},"required":[...]}
  nlohmann::json param_schema = nlohmann::json::object();
  std::map<std::string, ParamLocation> locations;
  std::string summary;
  bool enabled = true;
  std::string disabled_reason;

  // Names of the {param} segments of url_template, in order.
  std::vector<std::string> path_params() const;
  // Compact one-line-per-field rendering used in LLM prompts.
  nlohmann::json to_prompt_json() const;
};

enum class ToolKind { Builtin, OpenApiPlugin, WebBot };

std::string_view to_string(ToolKind k);

// How a plugin's credential is attached to requests. The secret itself is
// read from the named environment variable at call time.
struct AuthBinding {
  enum class Scheme { Bearer, Header, Query } scheme = Scheme::Bearer;
  std::string name;  // header or query parameter name
  std::string env_var;

  bool operator==(const AuthBinding&) const = default;
};

struct ToolDescriptor {
  std::string name;
  std::string description;
  ToolKind kind = ToolKind::Builtin;
  std::optional<nlohmann::json> spec;  // the OpenAPI document, as JSON
  std::vector<EndpointSpec> endpoints;
  std::string base_url;
  std::optional<AuthBinding> auth;
  bool enabled = true;

  // Throws InvalidArgument when name or description is empty or an
  // OpenApiPlugin lacks a spec.
  void validate() const;
  std::vector<const EndpointSpec*> enabled_endpoints() const;
  // nullptr when no endpoint has this operation id.
  const EndpointSpec* endpoint(const std::string& operation_id) const;
};

bool same_content(const ToolDescriptor& a, const ToolDescriptor& b);

}  // namespace agentrt::tools
