#include "agentrt/web/simulator.hpp"

#include <algorithm>
#include <functional>

#include "agentrt/core/text.hpp"

namespace agentrt::web {

using nlohmann::json;

namespace {

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

// Elements without a key get one from their position.
void assign_keys(json& n, const std::string& path) {
  if (!n.is_object()) return;
  if (!n.contains("key")) n["key"] = "@" + path;
  if (n.contains("children"))
    for (std::size_t i = 0; i < n["children"].size(); ++i)
      assign_keys(n["children"][i], path + "/" + std::to_string(i));
}

ErrorCategory fail_category(const std::string& s) {
  if (s == "stale_element") return ErrorCategory::StaleElement;
  if (s == "navigation") return ErrorCategory::Navigation;
  if (s == "timeout") return ErrorCategory::Timeout;
  return ErrorCategory::DriverError;
}

}  // namespace

SiteCorpus SiteCorpus::from_json(const json& j) {
  SiteCorpus c;
  for (const auto& [url, page] : j.at("pages").items()) c.pages[url] = page;
  c.start_url = j.value("start", c.pages.empty() ? std::string() : c.pages.begin()->first);
  return c;
}

SiteCorpus SiteCorpus::load_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  SiteCorpus c;
  for (const auto& f : files) {
    auto page = json::parse(text::read_file(f));
    if (page.value("version", 1) != 1)
      throw Error(ErrorCategory::InvalidArgument, f.string() + ": unsupported page version");
    const auto url = page.at("url").get<std::string>();
    if (page.value("start", false) || c.start_url.empty()) c.start_url = url;
    c.pages[url] = std::move(page);
  }
  if (c.pages.empty()) throw Error(ErrorCategory::NotFound, "no page definitions in " + dir.string());
  return c;
}

SimulatorDriver::SimulatorDriver(SiteCorpus corpus, std::size_t html_budget)
    : corpus_(std::move(corpus)), budget_(html_budget) {
  for (auto& [url, page] : corpus_.pages) assign_keys(page["dom"], "");
  if (!corpus_.start_url.empty()) navigate(corpus_.start_url);
}

const json& SimulatorDriver::page() const {
  const auto it = corpus_.pages.find(url_);
  if (it == corpus_.pages.end()) throw Error(ErrorCategory::Navigation, "no page loaded");
  return it->second;
}

void SimulatorDriver::navigate(const std::string& url) {
  if (!corpus_.pages.count(url)) throw Error(ErrorCategory::Navigation, "cannot reach " + url);
  url_ = url;
  ++generation_;
}

std::string SimulatorDriver::value(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? "" : it->second;
}

json SimulatorDriver::dom() const {
  json root = page().value("dom", json::object());
  root["title"] = page().value("title", "");
  std::function<void(json&)> walk = [&](json& n) {
    if (!n.is_object()) return;
    const auto key = n.value("key", "");
    if (auto v = values_.find(key); v != values_.end()) n["value"] = v->second;
    if (auto v = visibility_.find(key); v != visibility_.end()) n["visible"] = v->second;
    if (n.contains("children"))
      for (auto& c : n["children"]) walk(c);
  };
  walk(root);
  return root;
}

PageSnapshot SimulatorDriver::snapshot() {
  auto s = process_dom(dom(), url_, budget_);
  ids_.clear();
  for (const auto& e : s.elements) ids_[e.id] = {e.key, e.tag};
  snapshot_generation_ = generation_;
  return s;
}

void SimulatorDriver::apply(const json& t) {
  for (const auto& k : t.value("show", json::array())) visibility_[k.get<std::string>()] = true;
  for (const auto& k : t.value("hide", json::array())) visibility_[k.get<std::string>()] = false;
  const auto set = t.value("set", json::object());
  for (const auto& [k, v] : set.items()) values_[k] = v.get<std::string>();
  for (const auto& f : t.value("flags", json::array())) flags_.insert(f.get<std::string>());
  if (t.contains("goto")) navigate(t["goto"].get<std::string>());
}

void SimulatorDriver::inject(const json& mutation) {
  apply(mutation);
  ++generation_;
}

void SimulatorDriver::perform(const WebAction& action) {
  if (std::holds_alternative<Finish>(action)) return;
  if (snapshot_generation_ != generation_)
    throw Error(ErrorCategory::StaleElement, "the page changed since the last snapshot");
  const int id = std::visit(Overload{[](const Click& c) { return c.id; }, [](const SetValue& s) { return s.id; },
                                     [](const Finish&) { return 0; }},
                            action);
  const auto it = ids_.find(id);
  if (it == ids_.end()) throw Error(ErrorCategory::StaleElement, "no element with id " + std::to_string(id));
  const auto& [key, tag] = it->second;

  PerformedAction done;
  done.key = key;
  if (const auto* s = std::get_if<SetValue>(&action)) {
    if (tag != "input" && tag != "textarea" && tag != "select")
      throw Error(ErrorCategory::DriverError, "element " + std::to_string(id) + " does not accept a value");
    done.verb = "setValue";
    done.value = s->text;
  } else {
    done.verb = "click";
  }

  for (std::size_t i = 0; i < page().value("transitions", json::array()).size(); ++i) {
    const auto t = page()["transitions"][i];
    const auto on = t.value("on", json::object());
    if (on.value("verb", "") != done.verb || on.value("key", "") != key) continue;
    bool guards = true;
    const auto when = t.value("when", json::object());
    for (const auto& [k, v] : when.items()) guards = guards && value(k) == v.get<std::string>();
    if (!guards) continue;
    if (t.contains("fail")) {
      const auto slot = url_ + "#" + std::to_string(i);
      if (fail_counts_[slot]++ < t.value("fail_times", 1))
        throw Error(fail_category(t["fail"].get<std::string>()), "simulated failure on " + key);
      continue;
    }
    if (done.verb == "setValue") values_[key] = done.value;
    log_.push_back(done);
    ++generation_;
    apply(t);
    return;
  }
  if (done.verb == "setValue") values_[key] = done.value;
  log_.push_back(done);
  ++generation_;
}

}  // namespace agentrt::web
