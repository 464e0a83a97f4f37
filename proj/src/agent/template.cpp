#include "agentrt/agent/template.hpp"

#include <cctype>
#include <functional>

#include "agentrt/core/error.hpp"

namespace agentrt::agent {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Calls on_text for literal runs and on_slot for each placeholder name.
void scan(std::string_view s, const std::function<void(std::string_view)>& on_text,
          const std::function<void(std::string_view)>& on_slot) {
  std::size_t lit = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '{' || i + 1 >= s.size() || !ident_start(s[i + 1])) continue;
    std::size_t j = i + 1;
    while (j < s.size() && ident_char(s[j])) ++j;
    if (j >= s.size() || s[j] != '}') continue;
    on_text(s.substr(lit, i - lit));
    on_slot(s.substr(i + 1, j - i - 1));
    lit = j + 1;
    i = j;
  }
  on_text(s.substr(lit));
}

}  // namespace

Template::Template(std::string text) : text_(std::move(text)) {}

std::set<std::string> Template::placeholders() const {
  std::set<std::string> out;
  scan(text_, [](std::string_view) {}, [&](std::string_view name) { out.emplace(name); });
  return out;
}

std::string Template::render(const Bindings& bindings) const { return agent::render(text_, bindings); }

std::string render(std::string_view text, const Bindings& bindings) {
  std::string out;
  out.reserve(text.size());
  scan(
      text, [&](std::string_view lit) { out += lit; },
      [&](std::string_view name) {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end())
          throw Error(ErrorCategory::UnboundPlaceholder, "unbound placeholder {" + std::string(name) + "}");
        out += it->second;
      });
  return out;
}

}  // namespace agentrt::agent
