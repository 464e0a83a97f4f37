#pragma once

#include <optional>
#include <string>
#include <variant>

#include "agentrt/parse/role_event.hpp"
#include "agentrt/web/dom.hpp"

namespace agentrt::web {

struct Click {
  int id = 0;
  bool operator==(const Click&) const = default;
};
struct SetValue {
  int id = 0;
  std::string text;
  bool operator==(const SetValue&) const = default;
};
struct Finish {
  std::string answer;
  bool operator==(const Finish&) const = default;
};

using WebAction = std::variant<Click, SetValue, Finish>;

// "click(3)", "setValue(2, \"New York\")", "finish()" / "finish(\"...\")".
std::string render(const WebAction& a);

// The {formattedActions} list shown to the model.
std::string formatted_actions();

struct ActionCheck {
  std::optional<WebAction> action;
  std::string problem;  // set when action is empty
};

// Validates a parsed call against the snapshot: known verb, arity, integer
// id present on the page, and a form control for setValue.
ActionCheck check_action(const parse::WebActionCall& call, const PageSnapshot& snapshot);

}  // namespace agentrt::web
