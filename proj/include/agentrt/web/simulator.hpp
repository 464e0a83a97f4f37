#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "agentrt/web/driver.hpp"

namespace agentrt::web {

// Page definitions for the simulator. One page per file in a corpus
// directory (or one entry of {"pages": {url: page}}):
//   {"version": 1, "url": "sim://shop/", "title": "Shop",
//    "dom": <DomNode with "key"s on the elements that matter>,
//    "transitions": [
//      {"on": {"verb": "click" | "setValue", "key": "go"},
//       "when": {"from": "New York"},         // optional value guards
//       "goto": "sim://shop/results",          // optional
//       "show": ["opt1"], "hide": ["ad"],      // toggle visibility by key
//       "set": {"cls": "First"},               // assign values by key
//       "flags": ["submitted"],                // raise named flags
//       "fail": "stale_element" | "navigation" | "timeout" | "driver_error",
//       "fail_times": 1}]}                     // fail the first n matches
struct SiteCorpus {
  std::string start_url;  // first page loaded
  std::map<std::string, nlohmann::json> pages;

  static SiteCorpus from_json(const nlohmann::json& j);
  static SiteCorpus load_dir(const std::filesystem::path& dir);
};

struct PerformedAction {
  std::string verb;  // click | setValue
  std::string key;
  std::string value;
  bool operator==(const PerformedAction&) const = default;
};

// Deterministic in-memory browser over a site corpus.
class SimulatorDriver : public BrowserDriver {
 public:
  explicit SimulatorDriver(SiteCorpus corpus, std::size_t html_budget = 8000);

  void navigate(const std::string& url) override;
  PageSnapshot snapshot() override;
  void perform(const WebAction& action) override;

  // Applies a transition body ("show", "hide", "set", "flags", "goto")
  // outside any action, the way an advert or pop-up changes a live page.
  // Invalidates the current snapshot.
  void inject(const nlohmann::json& mutation);

  const std::string& url() const { return url_; }
  std::string value(const std::string& key) const;
  bool flag(const std::string& name) const { return flags_.count(name) > 0; }
  const std::vector<PerformedAction>& log() const { return log_; }
  // The page model as a driver would receive it: keys, values and
  // visibility applied.
  nlohmann::json dom() const;

 private:
  void apply(const nlohmann::json& t);
  const nlohmann::json& page() const;

  SiteCorpus corpus_;
  std::size_t budget_;
  std::string url_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> visibility_;
  std::set<std::string> flags_;
  std::map<std::string, int> fail_counts_;
  std::vector<PerformedAction> log_;
  std::uint64_t generation_ = 0;
  std::uint64_t snapshot_generation_ = ~0ull;
  std::map<int, std::pair<std::string, std::string>> ids_;  // id -> (key, tag)
};

}  // namespace agentrt::web
