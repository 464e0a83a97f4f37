#include "agentrt/exec/dataset.hpp"

#include <httplib.h>

#include "agentrt/core/text.hpp"

namespace agentrt::exec {

using nlohmann::json;

void to_json(json& j, const DatasetCard& c) { j = {{"title", c.title}, {"url", c.url}, {"size", c.size}}; }

void from_json(const json& j, DatasetCard& c) {
  c.title = j.at("title").get<std::string>();
  c.url = j.at("url").get<std::string>();
  c.size = j.value("size", std::uint64_t{0});
}

FixtureDatasetClient::FixtureDatasetClient(const json& fixture) {
  for (const auto& [q, cards] : fixture.items()) cards_[text::to_lower(q)] = cards.get<std::vector<DatasetCard>>();
}

FixtureDatasetClient FixtureDatasetClient::from_file(const std::filesystem::path& path) {
  return FixtureDatasetClient(json::parse(text::read_file(path)));
}

std::vector<DatasetCard> FixtureDatasetClient::search(const std::string& query) {
  const auto it = cards_.find(text::to_lower(text::trim(query)));
  return it == cards_.end() ? std::vector<DatasetCard>{} : it->second;
}

HttpDatasetClient::HttpDatasetClient(std::string base_url, std::string username, std::string key,
                                     std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), username_(std::move(username)), key_(std::move(key)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::vector<DatasetCard> HttpDatasetClient::search(const std::string& query) {
  const auto scheme_end = base_url_.find("://");
  const auto path_start = scheme_end == std::string::npos ? std::string::npos : base_url_.find('/', scheme_end + 3);
  httplib::Client cli(base_url_.substr(0, path_start));
  const std::string prefix = path_start == std::string::npos ? "" : base_url_.substr(path_start);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  if (!username_.empty() || !key_.empty()) cli.set_basic_auth(username_, key_);
  auto res = cli.Get(prefix + "/datasets/list", httplib::Params{{"search", query}}, httplib::Headers{});
  if (!res) throw Error(ErrorCategory::ClientUnavailable, "dataset search failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorCategory::ClientUnavailable, "dataset search answered HTTP " + std::to_string(res->status));
  std::vector<DatasetCard> out;
  try {
    for (const auto& d : json::parse(res->body)) {
      DatasetCard c;
      c.title = d.value("title", "");
      c.url = d.contains("url") && d["url"].is_string() ? d["url"].get<std::string>()
                                                        : "https://www.kaggle.com/datasets/" + d.value("ref", "");
      c.size = d.value("totalBytes", std::uint64_t{0});
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::ClientUnavailable, std::string("unreadable dataset listing: ") + e.what());
  }
  return out;
}

std::vector<datamodel::Artifact> dataset_search(const std::string& query, DatasetSearchClient& client) {
  std::vector<datamodel::Artifact> out;
  for (const auto& c : client.search(query))
    out.push_back(datamodel::Artifact::file_ref({c.url, c.size, std::nullopt}, "application/x-dataset", c.title));
  return out;
}

}  // namespace agentrt::exec
