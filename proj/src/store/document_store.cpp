#include "agentrt/store/document_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "agentrt/core/error.hpp"

namespace agentrt::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void unavailable(const std::string& what) {
  throw Error(ErrorCategory::StoreUnavailable, what + ": " + std::strerror(errno));
}

std::string hex_name(const std::string& user_id) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(user_id.size() * 2 + 6);
  for (unsigned char c : user_id) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  if (out.empty()) out = "_";
  return out + ".jsonl";
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

// ---- memory ---------------------------------------------------------------

void MemoryDocumentStore::put(const Document& doc) {
  std::lock_guard lock(mu_);
  const auto key = std::make_pair(doc.collection, doc.id);
  if (const auto it = index_.find(key); it != index_.end()) {
    docs_[it->second] = doc;
    return;
  }
  index_[key] = docs_.size();
  docs_.push_back(doc);
}

std::optional<Document> MemoryDocumentStore::get(const std::string& collection, const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = index_.find({collection, id});
  if (it == index_.end()) return std::nullopt;
  return docs_[it->second];
}

std::vector<Document> MemoryDocumentStore::query_by_user(const std::string& collection, const std::string& user_id) {
  std::lock_guard lock(mu_);
  std::vector<Document> out;
  for (const auto& d : docs_)
    if (d.collection == collection && d.user_id == user_id) out.push_back(d);
  return out;
}

// ---- file -----------------------------------------------------------------

FileDocumentStore::FileDocumentStore(fs::path root) : root_(std::move(root)) { open(); }

FileDocumentStore::~FileDocumentStore() = default;

void FileDocumentStore::open() {
  std::error_code ec;
  fs::create_directories(root_ / "users", ec);
  if (ec) throw Error(ErrorCategory::StoreUnavailable, "cannot create " + (root_ / "users").string() + ": " + ec.message());
  if (!load_index()) rebuild_index();
}

// Replays index.jsonl. Returns false when the index is absent or disagrees
// with the user files, in which case the caller rebuilds it.
bool FileDocumentStore::load_index() {
  const fs::path path = root_ / "index.jsonl";
  std::ifstream in(path, std::ios::binary);
  if (!in) return !fs::exists(path) && fs::is_empty(root_ / "users");

  std::map<std::pair<std::string, std::string>, Location> index;
  std::map<std::string, std::uint64_t> covered;  // file -> bytes accounted for
  std::uint64_t seq = 0;
  std::uint64_t good_bytes = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (in.eof()) break;  // no trailing newline: torn write
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return false;
    try {
      Location loc;
      loc.file = j.at("file").get<std::string>();
      loc.offset = j.at("offset").get<std::uint64_t>();
      loc.length = j.at("length").get<std::uint64_t>();
      const auto s = j.at("seq").get<std::uint64_t>();
      const auto key = std::make_pair(j.at("collection").get<std::string>(), j.at("id").get<std::string>());
      if (loc.offset != covered[loc.file]) return false;
      covered[loc.file] = loc.offset + loc.length;
      const auto prev = index.find(key);
      loc.first_seq = prev == index.end() ? s : prev->second.first_seq;
      index[key] = loc;
      seq = std::max(seq, s);
    } catch (const json::exception&) {
      return false;
    }
    good_bytes += line.size() + 1;
  }

  // Every user file must be exactly covered by the index, allowing a torn
  // tail which is cut off here.
  for (const auto& entry : fs::directory_iterator(root_ / "users")) {
    const std::string name = entry.path().filename().string();
    const std::uint64_t size = fs::file_size(entry.path());
    const std::uint64_t want = covered.count(name) ? covered[name] : 0;
    if (size < want) return false;
    if (size > want) {
      // Data present beyond the index: either a torn tail or a complete
      // line whose index entry was lost. Rebuild handles both.
      return false;
    }
  }
  for (const auto& [file, bytes] : covered)
    if (!fs::exists(root_ / "users" / file)) return false;

  if (good_bytes != fs::file_size(path)) fs::resize_file(path, good_bytes);
  index_ = std::move(index);
  seq_ = seq;
  return true;
}

void FileDocumentStore::rebuild_index() {
  index_rebuilt_ = true;
  struct Rec {
    std::uint64_t seq;
    std::string collection, id;
    Location loc;
  };
  std::vector<Rec> recs;
  for (const auto& entry : fs::directory_iterator(root_ / "users")) {
    const fs::path path = entry.path();
    const std::string name = path.filename().string();
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::uint64_t pos = 0;
    while (pos < content.size()) {
      const auto nl = content.find('\n', pos);
      if (nl == std::string::npos) break;
      json j = json::parse(content.begin() + static_cast<std::ptrdiff_t>(pos),
                           content.begin() + static_cast<std::ptrdiff_t>(nl), nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("seq")) break;
      recs.push_back({j["seq"].get<std::uint64_t>(), j.value("collection", ""), j.value("id", ""),
                      Location{name, pos, nl + 1 - pos, 0}});
      pos = nl + 1;
    }
    if (pos != content.size()) fs::resize_file(path, pos);  // torn tail
  }
  std::sort(recs.begin(), recs.end(), [](const Rec& a, const Rec& b) { return a.seq < b.seq; });

  const fs::path tmp = root_ / "index.jsonl.tmp";
  std::string out;
  index_.clear();
  seq_ = 0;
  for (const auto& r : recs) {
    auto key = std::make_pair(r.collection, r.id);
    Location loc = r.loc;
    const auto prev = index_.find(key);
    loc.first_seq = prev == index_.end() ? r.seq : prev->second.first_seq;
    index_[key] = loc;
    seq_ = std::max(seq_, r.seq);
    out += json{{"seq", r.seq}, {"collection", r.collection}, {"id", r.id}, {"file", loc.file},
                {"offset", loc.offset}, {"length", loc.length}}
               .dump() +
           "\n";
  }
  {
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) unavailable("cannot write " + tmp.string());
    std::size_t done = 0;
    while (done < out.size()) {
      const ssize_t n = ::write(fd, out.data() + done, out.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        ::close(fd);
        unavailable("cannot write " + tmp.string());
      }
      done += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
  }
  fs::rename(tmp, root_ / "index.jsonl");
  fsync_dir(root_);
}

void FileDocumentStore::append_line(const fs::path& path, const std::string& line, std::uint64_t* offset) {
  const bool fresh = !fs::exists(path);
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) unavailable("cannot open " + path.string());
  const off_t start = ::lseek(fd, 0, SEEK_END);
  if (offset) *offset = static_cast<std::uint64_t>(start);
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int saved = errno;
      if (::ftruncate(fd, start) != 0) { /* best effort */ }
      ::close(fd);
      errno = saved;
      unavailable("cannot append to " + path.string());
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int saved = errno;
    ::close(fd);
    errno = saved;
    unavailable("cannot sync " + path.string());
  }
  ::close(fd);
  if (fresh) fsync_dir(path.parent_path());
}

void FileDocumentStore::put(const Document& doc) {
  std::lock_guard lock(mu_);
  const std::uint64_t seq = seq_ + 1;
  const std::string file = hex_name(doc.user_id);
  const std::string line = json{{"seq", seq}, {"collection", doc.collection}, {"id", doc.id},
                                {"user_id", doc.user_id}, {"body", doc.body}}
                               .dump() +
                           "\n";
  std::uint64_t offset = 0;
  append_line(root_ / "users" / file, line, &offset);
  Location loc{file, offset, line.size(), seq};
  append_line(root_ / "index.jsonl",
              json{{"seq", seq}, {"collection", doc.collection}, {"id", doc.id}, {"file", file},
                   {"offset", offset}, {"length", loc.length}}
                      .dump() +
                  "\n",
              nullptr);
  const auto key = std::make_pair(doc.collection, doc.id);
  if (const auto it = index_.find(key); it != index_.end()) loc.first_seq = it->second.first_seq;
  index_[key] = loc;
  seq_ = seq;
}

Document FileDocumentStore::read_at(const Location& loc) const {
  std::ifstream in(root_ / "users" / loc.file, std::ios::binary);
  if (!in) throw Error(ErrorCategory::StoreUnavailable, "cannot read " + loc.file);
  std::string line(loc.length, '\0');
  in.seekg(static_cast<std::streamoff>(loc.offset));
  in.read(line.data(), static_cast<std::streamsize>(loc.length));
  if (!in) throw Error(ErrorCategory::StoreUnavailable, "short read in " + loc.file);
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCategory::StoreUnavailable, "corrupt record in " + loc.file);
  return Document{j.at("collection").get<std::string>(), j.at("id").get<std::string>(),
                  j.at("user_id").get<std::string>(), j.at("body")};
}

std::optional<Document> FileDocumentStore::get(const std::string& collection, const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = index_.find({collection, id});
  if (it == index_.end()) return std::nullopt;
  return read_at(it->second);
}

std::vector<Document> FileDocumentStore::query_by_user(const std::string& collection, const std::string& user_id) {
  std::lock_guard lock(mu_);
  const std::string file = hex_name(user_id);
  std::vector<const Location*> hits;
  for (const auto& [key, loc] : index_)
    if (key.first == collection && loc.file == file) hits.push_back(&loc);
  std::sort(hits.begin(), hits.end(), [](const Location* a, const Location* b) { return a->first_seq < b->first_seq; });
  std::vector<Document> out;
  out.reserve(hits.size());
  for (const auto* loc : hits) out.push_back(read_at(*loc));
  return out;
}

}  // namespace agentrt::store
