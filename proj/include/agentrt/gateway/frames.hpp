#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentrt/agent/loop.hpp"
#include "agentrt/parse/role_event.hpp"

namespace agentrt::gateway {

inline constexpr int kFrameVersion = 1;

enum class FrameEvent {
  TextDelta,
  ThoughtDelta,
  ActionStart,
  ActionName,
  ActionInputDelta,
  Observation,
  Block,
  Error,
  Done,
};

std::string_view to_string(FrameEvent e);
// Throws InvalidArgument for an unknown name.
FrameEvent frame_event_from_string(std::string_view name);

// `data` holds the event's own fields; "v" and "seq" are added on the wire.
struct Frame {
  FrameEvent event = FrameEvent::TextDelta;
  std::uint64_t seq = 0;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();

  bool operator==(const Frame&) const = default;
};

// "event: <name>\ndata: {"v":1,"seq":n,...}\n\n"
std::string encode_sse(const Frame& f);

// Splits an event stream into frames. Throws MalformedResponse on a block
// without event or data, or a data line that is not a JSON object with
// integer "v" and "seq".
std::vector<Frame> parse_sse(std::string_view stream);

// Checks a whole turn: seq starts at 1 and increases by one, every frame
// has v = 1, exactly one done and it is last, action.start is followed by
// action.name, and action.input.delta only continues an action group.
// Returns the first problem.
std::optional<std::string> validate_frames(const std::vector<Frame>& frames);

// The frame for a parser event; nullopt for events with no wire form
// (action end, web action call, parse warning).
std::optional<Frame> frame_for(const parse::RoleEvent& e);

Frame observation_frame(const agent::ToolCall& call, const agent::Observation& obs);
Frame block_frame(const nlohmann::json& block);
Frame error_frame(ErrorCategory category, const std::string& message);
Frame done_frame(std::string_view ended_by);

}  // namespace agentrt::gateway
