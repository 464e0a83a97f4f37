#include "agentrt/gateway/frames.hpp"

#include <array>

#include "agentrt/core/error.hpp"
#include "agentrt/datamodel/render.hpp"

namespace agentrt::gateway {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<FrameEvent, std::string_view>, 9> kNames{{
    {FrameEvent::TextDelta, "text.delta"},
    {FrameEvent::ThoughtDelta, "thought.delta"},
    {FrameEvent::ActionStart, "action.start"},
    {FrameEvent::ActionName, "action.name"},
    {FrameEvent::ActionInputDelta, "action.input.delta"},
    {FrameEvent::Observation, "observation"},
    {FrameEvent::Block, "block"},
    {FrameEvent::Error, "error"},
    {FrameEvent::Done, "done"},
}};

Frame make(FrameEvent e, ojson data) {
  Frame f;
  f.event = e;
  f.data = std::move(data);
  return f;
}

}  // namespace

std::string_view to_string(FrameEvent e) {
  for (const auto& [k, v] : kNames)
    if (k == e) return v;
  return "error";
}

FrameEvent frame_event_from_string(std::string_view name) {
  for (const auto& [k, v] : kNames)
    if (v == name) return k;
  throw Error(ErrorCategory::InvalidArgument, "unknown frame event '" + std::string(name) + "'");
}

std::string encode_sse(const Frame& f) {
  ojson wire = ojson::object();
  wire["v"] = kFrameVersion;
  wire["seq"] = f.seq;
  for (const auto& [k, v] : f.data.items()) wire[k] = v;
  std::string out = "event: ";
  out += to_string(f.event);
  out += "\ndata: ";
  out += wire.dump();
  out += "\n\n";
  return out;
}

std::vector<Frame> parse_sse(std::string_view stream) {
  std::vector<Frame> frames;
  std::string event, data;
  bool have_event = false, have_data = false;
  auto flush = [&] {
    if (!have_event && !have_data) return;
    if (!have_event || !have_data) throw Error(ErrorCategory::MalformedResponse, "frame without event or data");
    ojson j = ojson::parse(data, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("v") || !j["v"].is_number_integer() ||
        !j.contains("seq") || !j["seq"].is_number_unsigned())
      throw Error(ErrorCategory::MalformedResponse, "bad frame data: " + data);
    Frame f;
    f.event = frame_event_from_string(event);
    f.seq = j["seq"].get<std::uint64_t>();
    f.data = ojson::object();
    for (const auto& [k, v] : j.items())
      if (k != "seq") f.data[k] = v;
    frames.push_back(std::move(f));
    event.clear();
    data.clear();
    have_event = have_data = false;
  };
  std::size_t pos = 0;
  while (pos <= stream.size()) {
    auto nl = stream.find('\n', pos);
    if (nl == std::string_view::npos) nl = stream.size();
    std::string_view line = stream.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      flush();
    } else if (line.rfind("event:", 0) == 0) {
      event = std::string(line.substr(line.size() > 6 && line[6] == ' ' ? 7 : 6));
      have_event = true;
    } else if (line.rfind("data:", 0) == 0) {
      if (have_data) data += '\n';
      data += line.substr(line.size() > 5 && line[5] == ' ' ? 6 : 5);
      have_data = true;
    }
    // other fields (id:, retry:, comments) are ignored
    pos = nl + 1;
  }
  flush();
  return frames;
}

std::optional<std::string> validate_frames(const std::vector<Frame>& frames) {
  if (frames.empty()) return "empty stream";
  bool in_action = false;     // after action.name, input deltas allowed
  bool expect_name = false;   // after action.start
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    const std::string at = "frame " + std::to_string(i) + " (" + std::string(to_string(f.event)) + ")";
    if (f.seq != i + 1) return at + ": seq " + std::to_string(f.seq) + ", expected " + std::to_string(i + 1);
    if (!f.data.contains("v") || f.data["v"] != kFrameVersion) return at + ": missing or wrong v";
    if (expect_name && f.event != FrameEvent::ActionName) return at + ": action.start not followed by action.name";
    switch (f.event) {
      case FrameEvent::ActionStart:
        expect_name = true;
        in_action = false;
        break;
      case FrameEvent::ActionName:
        if (!expect_name) return at + ": action.name outside an action group";
        expect_name = false;
        in_action = true;
        break;
      case FrameEvent::ActionInputDelta:
        if (!in_action) return at + ": action.input.delta outside an action group";
        break;
      case FrameEvent::Done:
        if (i + 1 != frames.size()) return at + ": done is not last";
        if (!f.data.contains("ended_by")) return at + ": done without ended_by";
        break;
      default:
        in_action = false;
        break;
    }
  }
  if (frames.back().event != FrameEvent::Done) return "stream does not end with done";
  return std::nullopt;
}

std::optional<Frame> frame_for(const parse::RoleEvent& e) {
  if (const auto* t = std::get_if<parse::TextDelta>(&e)) return make(FrameEvent::TextDelta, {{"text", t->text}});
  if (const auto* t = std::get_if<parse::ThoughtDelta>(&e)) return make(FrameEvent::ThoughtDelta, {{"text", t->text}});
  if (std::holds_alternative<parse::ActionStart>(e)) return make(FrameEvent::ActionStart, ojson::object());
  if (const auto* n = std::get_if<parse::ActionName>(&e)) return make(FrameEvent::ActionName, {{"name", n->name}});
  if (const auto* d = std::get_if<parse::ActionInputDelta>(&e))
    return make(FrameEvent::ActionInputDelta, {{"text", d->text}});
  return std::nullopt;
}

Frame observation_frame(const agent::ToolCall& call, const agent::Observation& obs) {
  ojson blocks = ojson::array();
  for (const auto& a : obs.artifacts) blocks.push_back(ojson::parse(datamodel::render_frontend(a).dump()));
  return make(FrameEvent::Observation,
              {{"tool", call.action}, {"status", std::string(agent::to_string(obs.status))}, {"blocks", blocks}});
}

Frame block_frame(const nlohmann::json& block) {
  return make(FrameEvent::Block, {{"block", ojson::parse(block.dump())}});
}

Frame error_frame(ErrorCategory category, const std::string& message) {
  return make(FrameEvent::Error, {{"category", std::string(to_string(category))}, {"message", message}});
}

Frame done_frame(std::string_view ended_by) { return make(FrameEvent::Done, {{"ended_by", std::string(ended_by)}}); }

}  // namespace agentrt::gateway
