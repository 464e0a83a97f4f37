#include "agentrt/web/action.hpp"

#include <nlohmann/json.hpp>

#include <charconv>

#include "agentrt/core/text.hpp"

namespace agentrt::web {

namespace {

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

// A quoted argument loses its quotes (JSON escapes honoured); a bare one is
// taken as written.
std::string unquote(const std::string& arg) {
  const auto a = std::string(text::trim(arg));
  if (a.size() >= 2 && (a.front() == '"' || a.front() == '\'') && a.back() == a.front()) {
    if (a.front() == '"') {
      try {
        return nlohmann::json::parse(a).get<std::string>();
      } catch (const nlohmann::json::exception&) {
      }
    }
    return a.substr(1, a.size() - 2);
  }
  return a;
}

std::optional<int> parse_id(const std::string& arg) {
  const auto a = unquote(arg);
  int v = 0;
  const auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
  if (ec != std::errc() || p != a.data() + a.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string render(const WebAction& a) {
  return std::visit(Overload{[](const Click& c) { return "click(" + std::to_string(c.id) + ")"; },
                             [](const SetValue& s) { return "setValue(" + std::to_string(s.id) + ", " + quote(s.text) + ")"; },
                             [](const Finish& f) { return f.answer.empty() ? std::string("finish()") : "finish(" + quote(f.answer) + ")"; }},
                    a);
}

std::string formatted_actions() {
  return "1. click(elementId): clicks the element with the given id.\n"
         "2. setValue(elementId, \"value\"): focuses the input element with the given id and replaces its value.\n"
         "3. finish(): indicates the task is finished; the current page is passed on to the user.";
}

ActionCheck check_action(const parse::WebActionCall& call, const PageSnapshot& snapshot) {
  const auto& n = call.name;
  const auto argc = call.args.size();
  auto element = [&](const std::string& arg, const char* verb) -> std::variant<int, std::string> {
    const auto id = parse_id(arg);
    if (!id) return std::string(verb) + " needs an integer element id, got " + arg;
    if (!snapshot.element(*id))
      return "there is no element with id " + std::to_string(*id) + " on the current page (ids 1.." +
             std::to_string(snapshot.elements.size()) + ")";
    return *id;
  };
  if (n == "click") {
    if (argc != 1) return {std::nullopt, "click takes exactly one argument, got " + std::to_string(argc)};
    auto r = element(call.args[0], "click");
    if (auto* p = std::get_if<std::string>(&r)) return {std::nullopt, *p};
    return {Click{std::get<int>(r)}, ""};
  }
  if (n == "setValue") {
    if (argc != 2) return {std::nullopt, "setValue takes exactly two arguments, got " + std::to_string(argc)};
    auto r = element(call.args[0], "setValue");
    if (auto* p = std::get_if<std::string>(&r)) return {std::nullopt, *p};
    const int id = std::get<int>(r);
    const auto& tag = snapshot.element(id)->tag;
    if (tag != "input" && tag != "textarea" && tag != "select")
      return {std::nullopt, "element " + std::to_string(id) + " is a " + tag + ", not an input"};
    return {SetValue{id, unquote(call.args[1])}, ""};
  }
  if (n == "finish") {
    if (argc > 1) return {std::nullopt, "finish takes at most one argument, got " + std::to_string(argc)};
    return {Finish{argc ? unquote(call.args[0]) : ""}, ""};
  }
  return {std::nullopt, "unknown action " + n + "; use click, setValue or finish"};
}

}  // namespace agentrt::web
