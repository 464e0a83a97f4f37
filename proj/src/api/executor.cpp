#include "agentrt/api/executor.hpp"

#include <httplib.h>

#include <cctype>
#include <cstdlib>

#include "agentrt/agent/template.hpp"
#include "agentrt/datamodel/linearize.hpp"
#include "agentrt/datamodel/table.hpp"

namespace agentrt::api {

using nlohmann::json;

namespace {

std::string percent_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string scalar_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string error_text(const Trial& t) {
  return std::string(to_string(*t.error)) + ": " + t.error_detail;
}

}  // namespace

json trial_history_json(const std::vector<Trial>& trials) {
  json out = json::array();
  for (const auto& t : trials)
    out.push_back({{"endpoint", t.endpoint},
                   {"input_json", t.input_json},
                   {"output", t.output},
                   {"errors", t.error ? json(error_text(t)) : json(nullptr)}});
  return out;
}

std::string specs_string(const std::vector<const tools::EndpointSpec*>& specs) {
  json arr = json::array();
  for (const auto* s : specs) arr.push_back(s->to_prompt_json());
  return arr.dump(2);
}

json coerce_to_schema(const json& input, const json& schema) {
  if (!input.is_object()) return input;
  json out = input;
  const auto props = schema.value("properties", json::object());
  for (auto& [k, v] : out.items()) {
    if (!props.contains(k) || !v.is_string()) continue;
    const auto type = props[k].value("type", "");
    const auto s = v.get<std::string>();
    char* end = nullptr;
    if (type == "integer") {
      const long long n = std::strtoll(s.c_str(), &end, 10);
      if (!s.empty() && end && *end == '\0') v = n;
    } else if (type == "number") {
      const double d = std::strtod(s.c_str(), &end);
      if (!s.empty() && end && *end == '\0') v = d;
    } else if (type == "boolean") {
      if (s == "true" || s == "True") v = true;
      if (s == "false" || s == "False") v = false;
    }
  }
  return out;
}

Selection parse_selection(const std::string& reply) {
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw Error(ErrorCategory::LlmFormatError, "reply contains no JSON object");
  json j;
  try {
    j = json::parse(reply.substr(open, close - open + 1));
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::LlmFormatError, std::string("reply JSON does not parse: ") + e.what());
  }
  if (!j.contains("endpoint") || !j["endpoint"].is_string())
    throw Error(ErrorCategory::LlmFormatError, "reply lacks a string \"endpoint\"");
  Selection s;
  s.endpoint = j["endpoint"].get<std::string>();
  if (j.contains("input_json")) {
    if (!j["input_json"].is_object()) throw Error(ErrorCategory::LlmFormatError, "\"input_json\" is not an object");
    s.input_json = j["input_json"];
  }
  return s;
}

Selection select_and_fill(const std::vector<const tools::EndpointSpec*>& specs, const std::string& input_str,
                          const llm::LlmClient& llm, const std::vector<Trial>& history, const CancelToken& cancel,
                          const agent::PromptCatalog& catalog) {
  if (specs.empty()) throw Error(ErrorCategory::InvalidArgument, "plugin has no enabled endpoints");
  const agent::Bindings b = {{"specs_str", specs_string(specs)},
                             {"input_str", input_str},
                             {"trial_history", trial_history_json(history).dump(2)}};
  const auto& user = history.empty() ? catalog.get("api_user") : catalog.get("api_retry");
  const auto reply =
      llm.complete({{"system", catalog.get("api_system")}, {"user", agent::render(user, b)}}, kChannel, cancel);
  if (reply.finish == llm::FinishReason::Cancelled) throw Error(ErrorCategory::Interrupted, "cancelled");
  auto sel = parse_selection(reply.text);
  for (const auto* s : specs) {
    if (s->operation_id == sel.endpoint) {
      sel.input_json = coerce_to_schema(sel.input_json, s->param_schema);
      return sel;
    }
  }
  throw Error(ErrorCategory::UnknownEndpoint, "no endpoint named " + sel.endpoint);
}

datamodel::Artifact invoke(const tools::EndpointSpec& endpoint, const json& input_json, const InvokeOptions& opts) {
  for (const auto& r : endpoint.param_schema.value("required", json::array()))
    if (!input_json.contains(r.get<std::string>()))
      throw Error(ErrorCategory::InvalidArgument, "missing required parameter " + r.get<std::string>());

  std::string path = endpoint.url_template;
  std::string query;
  json body = json::object();
  httplib::Headers headers;
  for (const auto& [k, v] : input_json.items()) {
    auto loc = endpoint.locations.find(k);
    const auto where = loc == endpoint.locations.end() ? (endpoint.method == "GET" ? tools::ParamLocation::Query
                                                                                  : tools::ParamLocation::Body)
                                                       : loc->second;
    switch (where) {
      case tools::ParamLocation::Path: {
        const auto slot = "{" + k + "}";
        for (auto p = path.find(slot); p != std::string::npos; p = path.find(slot))
          path.replace(p, slot.size(), percent_encode(scalar_text(v)));
        break;
      }
      case tools::ParamLocation::Query:
        query += (query.empty() ? "" : "&") + percent_encode(k) + "=" + percent_encode(scalar_text(v));
        break;
      case tools::ParamLocation::Header: headers.emplace(k, scalar_text(v)); break;
      case tools::ParamLocation::Body: body[k] = v; break;
    }
  }
  if (opts.auth) {
    const char* secret = std::getenv(opts.auth->env_var.c_str());
    const std::string value = secret ? secret : "";
    switch (opts.auth->scheme) {
      case tools::AuthBinding::Scheme::Bearer: headers.emplace("Authorization", "Bearer " + value); break;
      case tools::AuthBinding::Scheme::Header: headers.emplace(opts.auth->name, value); break;
      case tools::AuthBinding::Scheme::Query:
        query += (query.empty() ? "" : "&") + percent_encode(opts.auth->name) + "=" + percent_encode(value);
        break;
    }
  }

  const auto scheme_end = opts.base_url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCategory::InvalidArgument, "plugin base_url needs a scheme");
  const auto path_start = opts.base_url.find('/', scheme_end + 3);
  std::string prefix = path_start == std::string::npos ? "" : opts.base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  httplib::Client cli(opts.base_url.substr(0, path_start));
  cli.set_connection_timeout(opts.timeout);
  cli.set_read_timeout(opts.timeout);
  cli.set_write_timeout(opts.timeout);

  httplib::Request req;
  req.method = endpoint.method;
  req.path = prefix + path + (query.empty() ? "" : "?" + query);
  req.headers = headers;
  if (!body.empty()) {
    req.body = body.dump();
    req.set_header("Content-Type", "application/json");
  }
  httplib::Response res;
  httplib::Error err = httplib::Error::Success;
  if (!cli.send(req, res, err)) {
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout || err == httplib::Error::Write)
      throw Error(ErrorCategory::Timeout, "no response within " + std::to_string(opts.timeout.count()) + " ms");
    throw Error(ErrorCategory::ConnectionFailed, "request failed: " + httplib::to_string(err));
  }
  if (res.status < 200 || res.status >= 300)
    throw Error(ErrorCategory::HttpError,
                "HTTP " + std::to_string(res.status) + ": " + datamodel::truncate_text(res.body, 512));

  if (res.body.size() > opts.char_budget)
    return datamodel::Artifact::text(datamodel::truncate_text(res.body, opts.char_budget));
  try {
    const auto j = json::parse(res.body);
    if (j.is_array() && !j.empty() && std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_object(); })) {
      std::string lines;
      for (const auto& row : j) lines += row.dump() + "\n";
      return datamodel::Artifact::table(datamodel::parse_json_lines(lines));
    }
  } catch (const std::exception&) {
    // not JSON, or not tabular: fall through to text
  }
  return datamodel::Artifact::text(res.body);
}

bool first_word_is_yes(const std::string& reply) {
  std::string word;
  for (char c : reply) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!word.empty()) {
      break;
    }
  }
  return word == "yes";
}

bool validate(const std::string& output, const std::string& input_str, const std::string& specs_str,
              const llm::LlmClient& llm, const CancelToken& cancel, const agent::PromptCatalog& catalog) {
  const auto prompt =
      agent::render(catalog.get("api_stop"), {{"specs_str", specs_str}, {"input_str", input_str}, {"api_output", output}});
  const auto reply = llm.complete({{"system", catalog.get("api_system")}, {"user", prompt}}, kChannel, cancel);
  if (reply.finish == llm::FinishReason::Cancelled) throw Error(ErrorCategory::Interrupted, "cancelled");
  return first_word_is_yes(reply.text);
}

ApiRunResult run(const tools::ToolDescriptor& plugin, const std::string& input_str, const llm::LlmClient& llm,
                 const ApiConfig& config, const CancelToken& cancel, const agent::PromptCatalog& catalog) {
  if (config.max_trials < 1) throw Error(ErrorCategory::InvalidArgument, "max_trials must be at least 1");
  const auto specs = plugin.enabled_endpoints();
  const auto specs_str = specs_string(specs);
  InvokeOptions inv = config.invoke;
  if (inv.base_url.empty()) inv.base_url = plugin.base_url;
  if (!inv.auth) inv.auth = plugin.auth;

  ApiRunResult result;
  for (int t = 0; t < config.max_trials; ++t) {
    if (cancel.cancelled()) throw Error(ErrorCategory::Interrupted, "cancelled");
    Trial trial;
    Selection sel;
    try {
      sel = select_and_fill(specs, input_str, llm, result.trials, cancel, catalog);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Interrupted) throw;
      trial.error = e.category();
      trial.error_detail = e.detail();
      result.trials.push_back(std::move(trial));
      continue;
    }
    trial.endpoint = sel.endpoint;
    trial.input_json = sel.input_json;
    try {
      const auto* ep = plugin.endpoint(sel.endpoint);
      auto out = invoke(*ep, sel.input_json, inv);
      const auto text = datamodel::linearize(out, inv.char_budget);
      trial.output = datamodel::truncate_text(text, config.trial_output_cap);
      result.output = out;
      const bool ok = validate(text, input_str, specs_str, llm, cancel, catalog);
      if (!ok) {
        trial.error = ErrorCategory::ToolError;
        trial.error_detail = "output judged insufficient for the input";
      }
      result.trials.push_back(std::move(trial));
      if (ok) {
        result.outcome = ApiOutcome::Validated;
        return result;
      }
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Interrupted) throw;
      trial.error = e.category();
      trial.error_detail = e.detail();
      result.trials.push_back(std::move(trial));
    }
  }
  result.outcome = ApiOutcome::Exhausted;
  return result;
}

ApiPluginTool::ApiPluginTool(tools::ToolDescriptor plugin, llm::LlmClient llm, ApiConfig config)
    : plugin_(std::move(plugin)), llm_(std::move(llm)), config_(std::move(config)) {}

agent::Observation ApiPluginTool::execute(const agent::ToolCall& call, agent::ToolContext& ctx) {
  const auto r = run(plugin_, call.action_input, llm_, config_, ctx.cancel);
  if (r.outcome == ApiOutcome::Validated) return agent::Observation::ok({*r.output});
  if (r.output) {
    return agent::Observation::ok(
        {*r.output, datamodel::Artifact::text("[unvalidated] This output could not be confirmed as answering the "
                                              "request after " +
                                              std::to_string(r.trials.size()) + " trials.")});
  }
  const auto& last = r.trials.back();
  return agent::Observation::failure(ErrorCategory::Exhausted,
                                     "all " + std::to_string(r.trials.size()) + " trials failed; last error " +
                                         error_text(last));
}

}  // namespace agentrt::api
