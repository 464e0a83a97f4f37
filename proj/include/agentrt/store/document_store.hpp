#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace agentrt::store {

struct Document {
  std::string collection;  // "sessions", "rounds"
  std::string id;          // unique within the collection
  std::string user_id;
  nlohmann::json body;

  bool operator==(const Document&) const = default;
};

// Conversation storage. A put is durable when it returns; putting an
// existing id replaces the document but keeps its position in query order.
// Implementations throw StoreUnavailable when the backend cannot be used.
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;
  virtual void put(const Document& doc) = 0;
  virtual std::optional<Document> get(const std::string& collection, const std::string& id) = 0;
  // The user's documents in the collection, in first-put order.
  virtual std::vector<Document> query_by_user(const std::string& collection, const std::string& user_id) = 0;
};

class MemoryDocumentStore : public DocumentStore {
 public:
  void put(const Document& doc) override;
  std::optional<Document> get(const std::string& collection, const std::string& id) override;
  std::vector<Document> query_by_user(const std::string& collection, const std::string& user_id) override;

 private:
  std::mutex mu_;
  std::vector<Document> docs_;
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

// Append-only JSON-lines store:
//   <root>/users/<hex(user_id)>.jsonl   one line per put:
//       {"seq": n, "collection": c, "id": i, "user_id": u, "body": {...}}
//   <root>/index.jsonl                  one line per put:
//       {"seq": n, "collection": c, "id": i, "file": "<hex>.jsonl", "offset": o, "length": l}
// Every line is fsync'ed before put returns. On open the index is replayed
// and checked against the user files; a torn final line (crash mid-write)
// is cut off, and a missing or inconsistent index is rebuilt from the user
// files.
class FileDocumentStore : public DocumentStore {
 public:
  explicit FileDocumentStore(std::filesystem::path root);
  ~FileDocumentStore() override;

  void put(const Document& doc) override;
  std::optional<Document> get(const std::string& collection, const std::string& id) override;
  std::vector<Document> query_by_user(const std::string& collection, const std::string& user_id) override;

  const std::filesystem::path& root() const { return root_; }
  bool index_rebuilt() const { return index_rebuilt_; }

 private:
  struct Location {
    std::string file;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    std::uint64_t first_seq = 0;
  };
  void open();
  bool load_index();
  void rebuild_index();
  void append_line(const std::filesystem::path& path, const std::string& line, std::uint64_t* offset);
  Document read_at(const Location& loc) const;

  std::filesystem::path root_;
  std::mutex mu_;
  std::uint64_t seq_ = 0;
  bool index_rebuilt_ = false;
  std::map<std::pair<std::string, std::string>, Location> index_;
};

}  // namespace agentrt::store
