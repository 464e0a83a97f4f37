#include "agentrt/tools/openapi.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "agentrt/core/error.hpp"

namespace agentrt::tools {

namespace {

using nlohmann::json;

Error spec_error(const std::string& msg) { return Error(ErrorCategory::SpecParseError, msg); }

json scalar_to_json(const YAML::Node& n) {
  const std::string& s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL") return nullptr;
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;
  static const std::regex int_re("[-+]?[0-9]+");
  static const std::regex float_re("[-+]?([0-9]+\\.[0-9]*|\\.[0-9]+|[0-9]+)([eE][-+]?[0-9]+)?");
  if (std::regex_match(s, int_re)) {
    try {
      return std::stoll(s);
    } catch (const std::out_of_range&) {
      return s;
    }
  }
  if (std::regex_match(s, float_re)) return std::stod(s);
  return s;
}

json yaml_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Scalar: return scalar_to_json(n);
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : n) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : n) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
  }
  return nullptr;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
}

// Resolves "#/a/b" references within the document; depth-limited so that
// cyclic schemas terminate.
json resolve(const json& doc, const json& node, int depth = 0) {
  if (depth > 16) return node;
  if (node.is_object()) {
    if (node.contains("$ref") && node["$ref"].is_string()) {
      const auto ref = node["$ref"].get<std::string>();
      if (ref.rfind("#/", 0) != 0) throw spec_error("unsupported $ref " + ref);
      json::json_pointer ptr(ref.substr(1));
      if (!doc.contains(ptr)) throw spec_error("dangling $ref " + ref);
      return resolve(doc, doc.at(ptr), depth + 1);
    }
    json out = json::object();
    for (const auto& [k, v] : node.items()) out[k] = resolve(doc, v, depth + 1);
    return out;
  }
  if (node.is_array()) {
    json out = json::array();
    for (const auto& v : node) out.push_back(resolve(doc, v, depth + 1));
    return out;
  }
  return node;
}

std::string make_operation_id(const std::string& method, const std::string& path) {
  std::string id = method;
  for (char c : path) id += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return id;
}

bool scheme_supported(const json& scheme) {
  const auto type = scheme.value("type", "");
  if (type == "apiKey") return scheme.value("in", "") != "cookie";
  if (type == "http") {
    auto s = scheme.value("scheme", "");
    std::transform(s.begin(), s.end(), s.begin(), ::tolower);
    return s == "bearer" || s == "basic";
  }
  return false;
}

}  // namespace

json parse_document(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw spec_error("line 1: empty document");
  if (text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw spec_error("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
  }
  try {
    return yaml_to_json(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw spec_error("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

ToolDescriptor ingest_openapi(const std::string& document, const std::string& name, const std::string& description) {
  return ingest_openapi_json(parse_document(document), name, description);
}

ToolDescriptor ingest_openapi_json(const json& doc, const std::string& name, const std::string& description) {
  if (!doc.is_object()) throw spec_error("line 1: document is not a mapping");
  const auto version = doc.value("openapi", json()).is_string() ? doc["openapi"].get<std::string>() : "";
  if (version.rfind("3.", 0) != 0) throw spec_error("line 1: not an OpenAPI 3.x document (openapi: " + version + ")");
  if (!doc.contains("paths") || !doc["paths"].is_object()) throw spec_error("line 1: missing paths object");

  ToolDescriptor d;
  d.name = name;
  d.description = description;
  d.kind = ToolKind::OpenApiPlugin;
  d.spec = doc;
  if (doc.contains("servers") && doc["servers"].is_array() && !doc["servers"].empty())
    d.base_url = doc["servers"][0].value("url", "");

  const json schemes = doc.contains("components") ? doc["components"].value("securitySchemes", json::object())
                                                  : json::object();
  const json global_security = doc.value("security", json::array());

  static const std::set<std::string> kMethods = {"get", "put", "post", "delete", "patch", "head", "options"};
  std::set<std::string> seen_ids;
  for (const auto& [path, raw_item] : doc["paths"].items()) {
    const json item = resolve(doc, raw_item);
    if (!item.is_object()) throw spec_error("line 1: path item " + path + " is not a mapping");
    const json shared_params = item.value("parameters", json::array());
    for (const auto& [method, op] : item.items()) {
      if (!kMethods.count(method)) continue;
      EndpointSpec e;
      e.method = method;
      std::transform(e.method.begin(), e.method.end(), e.method.begin(), ::toupper);
      e.url_template = path;
      e.operation_id = op.value("operationId", make_operation_id(method, path));
      if (!seen_ids.insert(e.operation_id).second)
        throw Error(ErrorCategory::SpecInvalid, "duplicate operationId " + e.operation_id);
      e.summary = op.value("summary", op.value("description", ""));

      json props = json::object();
      json required = json::array();
      auto add_param = [&](const json& p) {
        if (!p.is_object() || !p.contains("name")) throw spec_error("line 1: parameter without a name in " + path);
        const auto pname = p["name"].get<std::string>();
        const auto in = p.value("in", "query");
        if (in == "cookie") return;
        json schema = p.value("schema", json{{"type", "string"}});
        if (p.contains("description") && !schema.contains("description")) schema["description"] = p["description"];
        props[pname] = schema;
        e.locations[pname] = in == "path" ? ParamLocation::Path : in == "header" ? ParamLocation::Header
                                                                                : ParamLocation::Query;
        if (p.value("required", in == "path")) required.push_back(pname);
      };
      // Operation-level parameters override path-level ones with the same name.
      for (const auto& p : shared_params) add_param(p);
      for (const auto& p : op.value("parameters", json::array())) add_param(p);

      if (op.contains("requestBody")) {
        const auto& content = op["requestBody"].value("content", json::object());
        if (content.contains("application/json")) {
          const json body = content["application/json"].value("schema", json::object());
          if (body.value("type", "object") == "object" && body.contains("properties")) {
            for (const auto& [k, v] : body["properties"].items()) {
              props[k] = v;
              e.locations[k] = ParamLocation::Body;
            }
            for (const auto& r : body.value("required", json::array())) required.push_back(r);
          } else {
            props["body"] = body;
            e.locations["body"] = ParamLocation::Body;
            if (op["requestBody"].value("required", false)) required.push_back("body");
          }
        }
      }
      for (const auto& pp : e.path_params()) {
        if (!props.contains(pp)) {
          props[pp] = {{"type", "string"}};
          e.locations[pp] = ParamLocation::Path;
          required.push_back(pp);
        }
      }
      std::set<std::string> uniq;
      json req = json::array();
      for (const auto& r : required)
        if (uniq.insert(r.get<std::string>()).second) req.push_back(r);
      e.param_schema = {{"type", "object"}, {"properties", props}, {"required", req}};

      const json security = op.contains("security") ? op["security"] : global_security;
      if (security.is_array() && !security.empty()) {
        bool any_ok = false;
        std::string missing;
        for (const auto& alt : security) {
          bool ok = true;
          for (const auto& [scheme_name, _] : alt.items()) {
            if (!schemes.contains(scheme_name) || !scheme_supported(schemes[scheme_name])) {
              ok = false;
              missing = scheme_name;
            }
          }
          any_ok |= ok;
        }
        if (!any_ok) {
          e.enabled = false;
          e.disabled_reason = "unsupported auth scheme " + missing;
        }
      }
      d.endpoints.push_back(std::move(e));
    }
  }
  return d;
}

}  // namespace agentrt::tools
