#include "agentrt/tools/registry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "agentrt/core/error.hpp"
#include "agentrt/core/text.hpp"
#include "agentrt/tools/openapi.hpp"

namespace agentrt::tools {

ToolRegistry::ToolRegistry() : snap_(std::make_shared<const std::vector<ToolDescriptor>>()) {}

ToolRegistry::Snapshot ToolRegistry::snapshot() const {
  std::shared_lock lock(snap_mu_);
  return snap_;
}

void ToolRegistry::add(ToolDescriptor d) {
  d.validate();
  std::lock_guard w(write_mu_);
  auto next = std::make_shared<std::vector<ToolDescriptor>>(*snapshot());
  auto it = std::find_if(next->begin(), next->end(), [&](const ToolDescriptor& x) { return x.name == d.name; });
  if (it != next->end()) {
    if (same_content(*it, d)) return;
    throw Error(ErrorCategory::DuplicateName, "a different tool named " + d.name + " is already registered");
  }
  next->push_back(std::move(d));
  std::unique_lock lock(snap_mu_);
  snap_ = std::move(next);
}

void ToolRegistry::upsert(ToolDescriptor d) {
  d.validate();
  std::lock_guard w(write_mu_);
  auto next = std::make_shared<std::vector<ToolDescriptor>>(*snapshot());
  auto it = std::find_if(next->begin(), next->end(), [&](const ToolDescriptor& x) { return x.name == d.name; });
  if (it != next->end())
    *it = std::move(d);
  else
    next->push_back(std::move(d));
  std::unique_lock lock(snap_mu_);
  snap_ = std::move(next);
}

bool ToolRegistry::remove(const std::string& name) {
  std::lock_guard w(write_mu_);
  auto next = std::make_shared<std::vector<ToolDescriptor>>(*snapshot());
  const auto before = next->size();
  next->erase(std::remove_if(next->begin(), next->end(), [&](const ToolDescriptor& x) { return x.name == name; }),
              next->end());
  if (next->size() == before) return false;
  std::unique_lock lock(snap_mu_);
  snap_ = std::move(next);
  return true;
}

std::vector<ToolDescriptor> ToolRegistry::enabled() const {
  std::vector<ToolDescriptor> out;
  for (const auto& d : *snapshot())
    if (d.enabled) out.push_back(d);
  return out;
}

ToolDescriptor ToolRegistry::get(const std::string& name) const {
  for (const auto& d : *snapshot())
    if (d.name == name) return d;
  throw Error(ErrorCategory::NotFound, "no tool named " + name);
}

bool ToolRegistry::contains(const std::string& name) const {
  const auto s = snapshot();
  return std::any_of(s->begin(), s->end(), [&](const ToolDescriptor& d) { return d.name == name; });
}

std::vector<std::string> ToolRegistry::load_catalog_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCategory::NotFound, "catalog dir missing: " + dir.string());
  std::vector<std::filesystem::path> folders;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.json")) folders.push_back(entry.path());
  std::sort(folders.begin(), folders.end());

  std::vector<std::string> names;
  for (const auto& folder : folders) {
    const auto manifest = nlohmann::json::parse(text::read_file(folder / "manifest.json"));
    std::filesystem::path spec_path;
    for (const char* f : {"openapi.json", "openapi.yaml", "openapi.yml"})
      if (std::filesystem::exists(folder / f)) spec_path = folder / f;
    if (spec_path.empty()) throw Error(ErrorCategory::NotFound, "no openapi file in " + folder.string());
    auto d = ingest_openapi(text::read_file(spec_path), manifest.at("name").get<std::string>(),
                            manifest.at("description").get<std::string>());
    if (manifest.contains("base_url")) d.base_url = manifest["base_url"].get<std::string>();
    if (manifest.contains("auth")) {
      const auto& a = manifest["auth"];
      AuthBinding b;
      const auto scheme = a.value("scheme", "bearer");
      b.scheme = scheme == "header" ? AuthBinding::Scheme::Header
                 : scheme == "query" ? AuthBinding::Scheme::Query
                                     : AuthBinding::Scheme::Bearer;
      b.name = a.value("name", b.scheme == AuthBinding::Scheme::Bearer ? "Authorization" : "");
      b.env_var = a.at("env").get<std::string>();
      d.auth = b;
    }
    d.enabled = manifest.value("enabled", true);
    names.push_back(d.name);
    upsert(std::move(d));
  }
  return names;
}

Vector EmbeddingCache::get(Embedder& embedder, const std::string& text) {
  const auto key = std::make_pair(embedder.id(), text);
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto v = embedder.embed(text);
  normalize(v);
  std::lock_guard lock(mu_);
  cache_.emplace(key, v);
  return v;
}

std::size_t EmbeddingCache::size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

std::vector<ScoredTool> auto_select(const std::string& instruction, const std::vector<ToolDescriptor>& catalog,
                                    std::size_t k, Embedder& embedder, EmbeddingCache* cache) {
  if (k < 1) throw Error(ErrorCategory::InvalidArgument, "k must be at least 1");
  EmbeddingCache local;
  if (!cache) cache = &local;
  auto q = embedder.embed(instruction);
  normalize(q);
  std::vector<ScoredTool> scored;
  for (const auto& d : catalog) {
    if (!d.enabled) continue;
    const auto v = cache->get(embedder, d.description);
    scored.push_back({d.name, std::clamp(dot(q, v), -1.0, 1.0)});
  }
  if (scored.empty()) throw Error(ErrorCategory::InvalidArgument, "no enabled tools to select from");
  std::sort(scored.begin(), scored.end(), [](const ScoredTool& a, const ScoredTool& b) {
    const auto qa = std::llround(a.score * 1e9);
    const auto qb = std::llround(b.score * 1e9);
    if (qa != qb) return qa > qb;
    return a.name < b.name;
  });
  scored.resize(std::min(k, scored.size()));
  return scored;
}

std::vector<ScoredTool> auto_select_above(const std::string& instruction, const std::vector<ToolDescriptor>& catalog,
                                          std::size_t k, Embedder& embedder, EmbeddingCache* cache,
                                          double threshold) {
  auto out = auto_select(instruction, catalog, k, embedder, cache);
  out.erase(std::remove_if(out.begin(), out.end(), [&](const ScoredTool& s) { return s.score < threshold; }),
            out.end());
  return out;
}

std::vector<ToolDescriptor> synthetic_catalog(std::size_t n, std::uint64_t seed) {
  static const char* kVerbs[] = {"search", "compare", "book", "track", "summarize", "translate", "convert",
                                 "recommend", "monitor", "analyze", "find", "schedule"};
  static const char* kTopics[] = {"weather", "flights", "hotels", "stocks", "recipes", "music", "movies",
                                  "news", "maps", "restaurants", "jobs", "courses", "papers", "products",
                                  "currency", "sports", "podcasts", "books", "events", "trains", "crypto",
                                  "housing", "cars", "games", "fitness", "medicine", "laws", "patents",
                                  "datasets", "images", "videos", "code", "emails", "calendars", "taxes",
                                  "shipping", "pets", "gardening", "wine", "art"};
  static const char* kNouns[] = {"prices", "reviews", "forecasts", "listings", "schedules", "rankings",
                                 "summaries", "statistics", "alerts", "details"};
  static const char* kSources[] = {"public", "global", "local", "realtime", "curated", "open"};
  std::mt19937_64 rng(seed);
  std::vector<ToolDescriptor> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "tool_%03zu", i);
    const auto* verb = kVerbs[rng() % std::size(kVerbs)];
    const auto* topic = kTopics[rng() % std::size(kTopics)];
    const auto* topic2 = kTopics[rng() % std::size(kTopics)];
    const auto* noun = kNouns[rng() % std::size(kNouns)];
    const auto* source = kSources[rng() % std::size(kSources)];
    ToolDescriptor d;
    d.name = name;
    d.kind = ToolKind::Builtin;
    d.description = std::string("Plugin to ") + verb + " " + topic + " " + noun + " and " + topic2 + " data from " +
                    source + " sources.";
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace agentrt::tools
