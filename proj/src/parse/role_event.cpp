#include "agentrt/parse/role_event.hpp"

namespace agentrt::parse {

std::string_view to_string(WarningCategory category) {
  switch (category) {
    case WarningCategory::TrailingAfterAction: return "trailing_after_action";
    case WarningCategory::Unterminated: return "unterminated";
    case WarningCategory::Malformed: return "malformed";
    case WarningCategory::Overflow: return "overflow";
  }
  return "malformed";
}

std::string_view event_type(const RoleEvent& event) {
  struct Visitor {
    std::string_view operator()(const TextDelta&) const { return "text_delta"; }
    std::string_view operator()(const ThoughtDelta&) const { return "thought_delta"; }
    std::string_view operator()(const ActionStart&) const { return "action_start"; }
    std::string_view operator()(const ActionName&) const { return "action_name"; }
    std::string_view operator()(const ActionInputDelta&) const { return "action_input_delta"; }
    std::string_view operator()(const ActionEnd&) const { return "action_end"; }
    std::string_view operator()(const WebActionCall&) const { return "web_action_call"; }
    std::string_view operator()(const ParseWarning&) const { return "parse_warning"; }
  };
  return std::visit(Visitor{}, event);
}

nlohmann::json to_json(const RoleEvent& event) {
  nlohmann::json j = {{"type", event_type(event)}};
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, TextDelta> || std::is_same_v<T, ThoughtDelta> ||
                      std::is_same_v<T, ActionInputDelta>) {
          j["text"] = e.text;
        } else if constexpr (std::is_same_v<T, ActionName>) {
          j["name"] = e.name;
        } else if constexpr (std::is_same_v<T, ActionEnd>) {
          j["name"] = e.name;
          j["full_input"] = e.full_input;
          j["well_formed"] = e.well_formed;
        } else if constexpr (std::is_same_v<T, WebActionCall>) {
          j["name"] = e.name;
          j["raw_args"] = e.raw_args;
          j["args"] = e.args;
        } else if constexpr (std::is_same_v<T, ParseWarning>) {
          j["category"] = to_string(e.category);
          j["span"] = {e.span.begin, e.span.end};
        }
      },
      event);
  return j;
}

namespace {

template <class T>
bool merge_into(RoleEvent& last, const RoleEvent& next) {
  auto* a = std::get_if<T>(&last);
  const auto* b = std::get_if<T>(&next);
  if (!a || !b) return false;
  a->text += b->text;
  return true;
}

}  // namespace

std::vector<RoleEvent> coalesce(std::vector<RoleEvent> events) {
  std::vector<RoleEvent> out;
  out.reserve(events.size());
  for (auto& e : events) {
    if (!out.empty() && (merge_into<TextDelta>(out.back(), e) || merge_into<ThoughtDelta>(out.back(), e) ||
                         merge_into<ActionInputDelta>(out.back(), e)))
      continue;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace agentrt::parse
