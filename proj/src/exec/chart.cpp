#include "agentrt/exec/chart.hpp"

#include "agentrt/core/text.hpp"
#include "agentrt/datamodel/linearize.hpp"

namespace agentrt::exec {

using nlohmann::json;

namespace {

constexpr const char* kSystem =
    "You turn a table into a chart specification. Reply with one JSON object in a ```json fenced block:\n"
    "{\"chart_type\": \"bar\" | \"line\" | \"pie\" | \"scatter\", \"title\": string,\n"
    " \"x\": {\"name\": string, \"values\": [...]},\n"
    " \"series\": [{\"name\": string, \"values\": [...]}]}\n"
    "Each series must have exactly as many values as x. Use only data present in the table.";

std::optional<json> parse_spec(const std::string& reply) {
  auto body = text::fenced_block(reply, "json");
  std::string s = body ? *body : reply;
  const auto open = s.find('{');
  const auto close = s.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
  try {
    return json::parse(s.substr(open, close - open + 1));
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<std::string> chart_spec_problem(const json& spec) {
  if (!spec.is_object()) return "the spec is not a JSON object";
  const auto type = spec.value("chart_type", json());
  if (!type.is_string()) return "chart_type is missing";
  const auto t = type.get<std::string>();
  if (t != "bar" && t != "line" && t != "pie" && t != "scatter")
    return "chart_type must be bar, line, pie or scatter, not " + t;
  if (!spec.contains("title") || !spec["title"].is_string()) return "title must be a string";
  if (!spec.contains("x") || !spec["x"].is_object()) return "x must be an object";
  const auto& x = spec["x"];
  if (!x.contains("name") || !x["name"].is_string()) return "x.name must be a string";
  if (!x.contains("values") || !x["values"].is_array()) return "x.values must be an array";
  if (!spec.contains("series") || !spec["series"].is_array() || spec["series"].empty())
    return "series must be a non-empty array";
  for (std::size_t i = 0; i < spec["series"].size(); ++i) {
    const auto& s = spec["series"][i];
    const auto at = "series[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("name") || !s["name"].is_string()) return at + ".name must be a string";
    if (!s.contains("values") || !s["values"].is_array()) return at + ".values must be an array";
    if (s["values"].size() != x["values"].size())
      return at + " has " + std::to_string(s["values"].size()) + " values but x has " +
             std::to_string(x["values"].size());
  }
  return std::nullopt;
}

datamodel::Artifact build_chart(const std::string& nl_query, const datamodel::Artifact& table, const llm::LlmClient& llm,
                                const CancelToken& cancel) {
  if (table.kind() != datamodel::ArtifactKind::Table)
    throw Error(ErrorCategory::InvalidArgument, "charting needs a table, got " + std::string(to_string(table.kind())));
  std::vector<llm::ChatMessage> messages = {
      {"system", kSystem},
      {"user", "Request: " + nl_query + "\n\nTable:\n" + datamodel::linearize(table, 3000)}};
  std::string problem;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto reply = llm.complete(messages, kChartChannel, cancel);
    if (reply.finish == llm::FinishReason::Cancelled) throw Error(ErrorCategory::Interrupted, "cancelled");
    const auto spec = parse_spec(reply.text);
    const auto why = spec ? chart_spec_problem(*spec) : std::optional<std::string>("the reply holds no JSON object");
    if (!why) return datamodel::Artifact::chart(*spec, (*spec)["title"].get<std::string>());
    problem = *why;
    messages.push_back({"assistant", reply.text});
    messages.push_back({"user", "That spec is invalid: " + problem + ". Reply with a corrected spec."});
  }
  throw Error(ErrorCategory::SpecInvalid, problem);
}

}  // namespace agentrt::exec
