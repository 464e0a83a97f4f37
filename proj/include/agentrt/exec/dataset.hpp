#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "agentrt/datamodel/artifact.hpp"

namespace agentrt::exec {

struct DatasetCard {
  std::string title;
  std::string url;
  std::uint64_t size = 0;  // bytes

  bool operator==(const DatasetCard&) const = default;
};

void to_json(nlohmann::json& j, const DatasetCard& c);
void from_json(const nlohmann::json& j, DatasetCard& c);

class DatasetSearchClient {
 public:
  virtual ~DatasetSearchClient() = default;
  // Throws ClientUnavailable when the backing service cannot answer.
  virtual std::vector<DatasetCard> search(const std::string& query) = 0;
};

// Canned results keyed by lower-cased query: {"titanic": [{title, url, size}]}.
// Unknown queries return no cards.
class FixtureDatasetClient : public DatasetSearchClient {
 public:
  explicit FixtureDatasetClient(const nlohmann::json& fixture);
  static FixtureDatasetClient from_file(const std::filesystem::path& path);
  std::vector<DatasetCard> search(const std::string& query) override;

 private:
  std::map<std::string, std::vector<DatasetCard>> cards_;
};

// Kaggle-style listing endpoint: GET {base_url}/datasets/list?search=<q>
// with HTTP basic auth, answering [{"title", "ref" | "url", "totalBytes"}].
class HttpDatasetClient : public DatasetSearchClient {
 public:
  HttpDatasetClient(std::string base_url, std::string username, std::string key,
                    std::chrono::milliseconds timeout = std::chrono::seconds(15));
  std::vector<DatasetCard> search(const std::string& query) override;

 private:
  std::string base_url_, username_, key_;
  std::chrono::milliseconds timeout_;
};

// FileRef artifacts (rendered as cards) for the client's results.
std::vector<datamodel::Artifact> dataset_search(const std::string& query, DatasetSearchClient& client);

}  // namespace agentrt::exec
