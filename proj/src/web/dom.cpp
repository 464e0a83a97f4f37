#include "agentrt/web/dom.hpp"

#include <set>

#include "agentrt/core/text.hpp"
#include "agentrt/datamodel/linearize.hpp"

namespace agentrt::web {

using nlohmann::json;

namespace {

const std::set<std::string> kInteractable = {"a", "button", "input", "select", "option", "textarea"};
const std::set<std::string> kBlock = {"body", "div", "p", "h1", "h2", "h3", "h4", "h5", "h6", "li", "ul", "ol",
                                      "tr", "table", "section", "form", "header", "footer", "nav", "main",
                                      "article", "aside", "br", "label", "dialog"};
const char* kHintAttrs[] = {"type", "name", "placeholder", "aria-label", "title", "href", "role", "alt"};

std::string str_field(const json& n, const char* k) {
  if (!n.is_object() || !n.contains(k)) return "";
  const auto& v = n[k];
  return v.is_string() ? v.get<std::string>() : v.dump();
}

bool visible(const json& n) { return !n.is_object() || n.value("visible", true); }

std::string collapse(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string quote_attr(const std::string& v) {
  std::string out = "\"";
  for (char c : v) out += c == '"' ? std::string("&quot;") : std::string(1, c);
  return out + "\"";
}

struct Walker {
  std::vector<ElementInfo> elements;

  std::string text_of(const json& n) {
    if (n.is_string()) return n.get<std::string>();
    if (!visible(n)) return "";
    std::string out = str_field(n, "text");
    for (const auto& c : n.value("children", json::array())) out += " " + text_of(c);
    return out;
  }

  std::string render(const json& n, std::vector<int>& path) {
    if (n.is_string()) return n.get<std::string>();
    if (!visible(n)) return "";
    const auto tag = text::to_lower(str_field(n, "tag"));
    std::string inner = str_field(n, "text");
    std::string open, close;
    if (is_interactable(tag)) {
      ElementInfo e;
      e.id = static_cast<int>(elements.size()) + 1;
      e.tag = tag;
      e.visible_text = collapse(text_of(n));
      e.input_value = str_field(n, "value");
      e.key = str_field(n, "key");
      e.path = path;
      const auto attrs = n.value("attrs", json::object());
      for (const char* a : kHintAttrs)
        if (attrs.contains(a)) e.hints[a] = attrs[a].is_string() ? attrs[a].get<std::string>() : attrs[a].dump();
      open = "<" + tag + " id=" + std::to_string(e.id);
      for (const auto& [k, v] : e.hints) open += " " + k + "=" + quote_attr(v);
      if (n.contains("value")) open += " value=" + quote_attr(e.input_value);
      const bool is_void = tag == "input";
      open += is_void ? "/>" : ">";
      close = is_void ? "" : "</" + tag + ">";
      elements.push_back(std::move(e));
    }
    const auto children = n.value("children", json::array());
    for (std::size_t i = 0; i < children.size(); ++i) {
      path.push_back(static_cast<int>(i));
      append(inner, render(children[i], path));
      path.pop_back();
    }
    auto out = open + std::string(text::trim(inner)) + close;
    return kBlock.count(tag) ? "\n" + out + "\n" : out;
  }

  // Joins with a space unless either side already breaks the line.
  static void append(std::string& acc, const std::string& piece) {
    if (piece.empty()) return;
    if (!acc.empty() && acc.back() != '\n' && piece.front() != '\n') acc += ' ';
    acc += piece;
  }
};

}  // namespace

const ElementInfo* PageSnapshot::element(int id) const {
  if (id < 1 || static_cast<std::size_t>(id) > elements.size()) return nullptr;
  return &elements[static_cast<std::size_t>(id) - 1];
}

json to_json(const PageSnapshot& s) {
  json els = json::array();
  for (const auto& e : s.elements)
    els.push_back({{"id", e.id}, {"tag", e.tag}, {"visible_text", e.visible_text}, {"input_value", e.input_value},
                   {"hints", e.hints}});
  return {{"url", s.url}, {"title", s.title}, {"elements", els}, {"processed_html", s.processed_html}};
}

bool is_interactable(const std::string& tag) { return kInteractable.count(tag) > 0; }

PageSnapshot process_dom(const DomNode& root, const std::string& url, std::size_t budget) {
  Walker w;
  std::vector<int> path;
  const auto full = w.render(root, path);
  std::string tidy;
  for (const auto& line : text::split_lines(full)) {
    const auto t = collapse(line);
    if (t.empty()) continue;
    if (!tidy.empty()) tidy += "\n";
    tidy += t;
  }
  PageSnapshot s;
  s.url = url;
  s.title = root.is_object() ? root.value("title", "") : "";
  s.elements = std::move(w.elements);
  s.processed_html = tidy.size() > budget ? datamodel::truncate_text(tidy, budget) : tidy;
  return s;
}

}  // namespace agentrt::web
