#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace agentrt::tools {

using Vector = std::vector<double>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  // Raw embedding; callers normalize. Throws EmbedderUnavailable.
  virtual Vector embed(std::string_view text) = 0;
  virtual std::string id() const = 0;
};

// Feature hashing over lower-cased alphanumeric words: each word adds 1 to
// bucket FNV-1a(seed, word) mod dims; the result is unit-normalized (an
// input with no words maps to the zero vector).
class HashingEmbedder : public Embedder {
 public:
  explicit HashingEmbedder(std::uint64_t seed = 0, std::size_t dims = 256);
  Vector embed(std::string_view text) override;
  std::string id() const override;

  std::size_t bucket(std::string_view word) const;

 private:
  std::uint64_t seed_;
  std::size_t dims_;
};

// Client for an OpenAI-style embeddings endpoint: POST {base_url}/embeddings
// {"model", "input"} answered by {"data": [{"embedding": [...]}]}.
class RemoteEmbedder : public Embedder {
 public:
  RemoteEmbedder(std::string base_url, std::string model, std::string api_key, int timeout_ms = 10000);
  Vector embed(std::string_view text) override;
  std::string id() const override { return "remote:" + model_; }

 private:
  std::string origin_;
  std::string path_prefix_;
  std::string model_;
  std::string api_key_;
  int timeout_ms_;
};

// Lower-cased alphanumeric words of `text`.
std::vector<std::string> words(std::string_view text);

// Scales v to unit length in place; the zero vector is left unchanged.
void normalize(Vector& v);
double dot(const Vector& a, const Vector& b);

}  // namespace agentrt::tools
