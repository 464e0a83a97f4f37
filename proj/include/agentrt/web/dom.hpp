#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace agentrt::web {

// Raw page model, a JSON tree:
//   {"tag": "button", "text": "Go", "attrs": {"type": "submit"},
//    "visible": true, "value": "", "key": "go", "children": [...]}
// Every field is optional. A node without a tag is plain text. "key" is a
// stable name used by drivers and never rendered; "value" is the current
// value of a form control.
using DomNode = nlohmann::json;

struct ElementInfo {
  int id = 0;  // 1..N in document order
  std::string tag;
  std::string visible_text;
  std::string input_value;
  std::map<std::string, std::string> hints;  // type, placeholder, aria-label, ...
  std::string key;
  std::vector<int> path;  // child indices from the root

  bool operator==(const ElementInfo&) const = default;
};

struct PageSnapshot {
  std::string url;
  std::string title;
  std::vector<ElementInfo> elements;
  std::string processed_html;

  const ElementInfo* element(int id) const;
  bool operator==(const PageSnapshot&) const = default;
};

nlohmann::json to_json(const PageSnapshot& s);

// Tags that receive ids.
bool is_interactable(const std::string& tag);

// Numbers the visible interactable elements in document order and renders
// the page as text with those elements inlined as tags carrying their ids.
// Everything else is flattened to text. The rendering is capped at `budget`
// bytes with the text elision marker; the element list is never capped.
PageSnapshot process_dom(const DomNode& root, const std::string& url, std::size_t budget);

}  // namespace agentrt::web
