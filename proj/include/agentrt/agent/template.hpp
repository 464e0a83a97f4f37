#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace agentrt::agent {

using Bindings = std::map<std::string, std::string>;

// A prompt template. Placeholders are `{identifier}` (letters, digits and
// underscores, not starting with a digit); every other brace is literal
// text, so JSON examples inside prompts need no escaping.
class Template {
 public:
  Template() = default;
  explicit Template(std::string text);

  const std::string& text() const { return text_; }
  std::set<std::string> placeholders() const;

  // Substitutes every placeholder. Extra bindings are ignored; a placeholder
  // without a binding throws UnboundPlaceholder naming it.
  std::string render(const Bindings& bindings) const;

 private:
  std::string text_;
};

std::string render(std::string_view text, const Bindings& bindings);

}  // namespace agentrt::agent
