#include "agentrt/tools/embedder.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>

#include "agentrt/core/error.hpp"

namespace agentrt::tools {

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void normalize(Vector& v) {
  double n = 0;
  for (double x : v) n += x * x;
  if (n == 0) return;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw Error(ErrorCategory::InvalidArgument, "embedding dimensions differ");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

HashingEmbedder::HashingEmbedder(std::uint64_t seed, std::size_t dims) : seed_(seed), dims_(dims) {
  if (dims == 0) throw Error(ErrorCategory::InvalidArgument, "embedding dimension must be positive");
}

std::size_t HashingEmbedder::bucket(std::string_view word) const {
  std::uint64_t h = 1469598103934665603ULL ^ seed_;
  for (unsigned char c : word) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h % dims_);
}

Vector HashingEmbedder::embed(std::string_view text) {
  Vector v(dims_, 0.0);
  for (const auto& w : words(text)) v[bucket(w)] += 1.0;
  normalize(v);
  return v;
}

std::string HashingEmbedder::id() const {
  return "hashing:" + std::to_string(seed_) + ":" + std::to_string(dims_);
}

RemoteEmbedder::RemoteEmbedder(std::string base_url, std::string model, std::string api_key, int timeout_ms)
    : model_(std::move(model)), api_key_(std::move(api_key)), timeout_ms_(timeout_ms) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCategory::InvalidArgument, "base_url needs a scheme");
  const auto path_start = base_url.find('/', scheme_end + 3);
  origin_ = base_url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

Vector RemoteEmbedder::embed(std::string_view text) {
  httplib::Client cli(origin_);
  cli.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
  cli.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
  const nlohmann::json body = {{"model", model_}, {"input", std::string(text)}};
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = cli.Post(path_prefix_ + "/embeddings", headers, body.dump(), "application/json");
  if (!res) throw Error(ErrorCategory::EmbedderUnavailable, "embedding request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorCategory::EmbedderUnavailable, "embedding service returned HTTP " + std::to_string(res->status));
  try {
    auto v = nlohmann::json::parse(res->body).at("data").at(0).at("embedding").get<Vector>();
    if (v.empty()) throw Error(ErrorCategory::EmbedderUnavailable, "empty embedding");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::EmbedderUnavailable, std::string("bad embedding response: ") + e.what());
  }
}

}  // namespace agentrt::tools
