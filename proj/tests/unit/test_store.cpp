#include <doctest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "agentrt/core/error.hpp"
#include "agentrt/core/text.hpp"
#include "agentrt/datamodel/linearize.hpp"
#include "agentrt/store/document_store.hpp"
#include "agentrt/store/grounding.hpp"
#include "agentrt/store/kv.hpp"
#include "agentrt/store/session.hpp"

using namespace agentrt;
using namespace agentrt::store;
using namespace agentrt::datamodel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "agentrt-store-XXXXXX").string();
    path = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

ErrorCategory category_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  return ErrorCategory::Internal;
}

// Deterministic round content, so a crashed writer's output can be checked
// by recomputation.
Round make_round(std::size_t index, const std::string& tag) {
  Round r;
  r.index = index;
  Message user{Role::User, {Artifact::text(tag + " question " + std::to_string(index))}, index};
  Message action{Role::Assistant, {Artifact::text("Action: python\nAction Input: print(" + std::to_string(index) + ")")},
                 index};
  Table t;
  t.columns = {"k", "v"};
  t.rows = {{json(index), json("v" + std::to_string(index))}};
  Message obs{Role::ToolObservation, {Artifact::table(t, "result")}, index};
  Message answer{Role::Assistant, {Artifact::text("answer " + std::to_string(index) + " \xc3\xa9")}, index};
  r.messages = {user, action, obs, answer};
  return r;
}

Session make_session(const std::string& id, const std::string& user) {
  Session s;
  s.id = id;
  s.user_id = user;
  s.profile = agent::AgentKind::Data;
  s.selected_tools = ToolSelection{false, {"python", "sql"}};
  s.created_at = "2026-01-01T00:00:00Z";
  return s;
}

class FlakyStore : public DocumentStore {
 public:
  std::atomic<bool> down{false};
  MemoryDocumentStore inner;
  std::vector<Document> writes;
  std::mutex mu;

  void put(const Document& d) override {
    if (down) throw Error(ErrorCategory::StoreUnavailable, "backend offline");
    std::lock_guard lock(mu);
    writes.push_back(d);
    inner.put(d);
  }
  std::optional<Document> get(const std::string& c, const std::string& id) override { return inner.get(c, id); }
  std::vector<Document> query_by_user(const std::string& c, const std::string& u) override {
    return inner.query_by_user(c, u);
  }
};

std::string csv_of(std::size_t rows) {
  std::string s = "id,name,score\n";
  for (std::size_t i = 0; i < rows; ++i)
    s += std::to_string(i) + ",n" + std::to_string(i) + "," + std::to_string(i * 1.5) + "\n";
  return s;
}

}  // namespace

TEST_CASE("kv store: set, get, delete and ttl") {
  auto now = MemoryKVStore::Clock::time_point{};
  MemoryKVStore kv([&] { return now; });
  CHECK_FALSE(kv.get("a"));
  kv.set("a", "1");
  CHECK(kv.get("a") == "1");
  kv.set("b", "2", std::chrono::milliseconds(100));
  CHECK(kv.expire("a", std::chrono::milliseconds(50)));
  now += std::chrono::milliseconds(60);
  CHECK_FALSE(kv.get("a"));
  CHECK(kv.get("b") == "2");
  now += std::chrono::milliseconds(50);
  CHECK_FALSE(kv.get("b"));
  CHECK_FALSE(kv.expire("b", std::chrono::milliseconds(10)));
  kv.set("c", "3");
  CHECK(kv.del("c"));
  CHECK_FALSE(kv.del("c"));
  CHECK(kv.size() == 0);
}

TEST_CASE("kv store: concurrent writers never tear a value") {
  MemoryKVStore kv;
  std::atomic<bool> bad{false};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      const std::string mine(64, static_cast<char>('a' + t));
      for (int i = 0; i < 2000; ++i) {
        kv.set("shared", mine);
        const auto v = kv.get("shared");
        if (!v || v->size() != 64 || std::count(v->begin(), v->end(), (*v)[0]) != 64) bad = true;
      }
    });
  for (auto& t : threads) t.join();
  CHECK_FALSE(bad);
}

TEST_CASE("grounding pool: suffixing rule") {
  CHECK(suffixed_name("a.csv", 2) == "a-2.csv");
  CHECK(suffixed_name("a.csv", 3) == "a-3.csv");
  CHECK(suffixed_name("data", 2) == "data-2");
  CHECK(suffixed_name("a.tar.gz", 2) == "a.tar-2.gz");

  GroundingPool pool;
  CHECK(pool.add("a.csv", Artifact::text("x")) == "a.csv");
  CHECK(pool.add("a.csv", Artifact::text("y")) == "a-2.csv");
  CHECK(pool.add("a.csv", Artifact::text("z")) == "a-3.csv");
  CHECK(pool.find("a-2.csv")->artifact.name() == "a-2.csv");
  CHECK(pool.keys() == std::vector<std::string>{"a.csv", "a-2.csv", "a-3.csv"});
}

TEST_CASE("grounding pool: names stay unique under any upload sequence") {
  const std::vector<std::string> names = {"a.csv", "a-2.csv", "a", "a-2", "a-3.csv", "b.json", "a.csv.bak", ".env"};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    GroundingPool pool;
    std::set<std::string> first_seen;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      const std::string& name = names[rng() % names.size()];
      const bool was_free = !pool.contains(name);
      const std::string key = pool.add(name, Artifact::text(name));
      if (was_free) CHECK(key == name);
    }
    const auto keys = pool.keys();
    REQUIRE(std::set<std::string>(keys.begin(), keys.end()).size() == keys.size());
    REQUIRE(pool.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("upload: csv becomes a table and collisions are suffixed") {
  TempDir dir;
  GroundingPool pool;
  UploadOptions opts;
  opts.files_dir = dir.path / "files";
  const auto first = upload_file(pool, "a.csv", "x,y\n1,2\n3,4\n5,6\n", "text/csv", opts);
  CHECK(first.key == "a.csv");
  REQUIRE(first.artifact.kind() == ArtifactKind::Table);
  CHECK(first.artifact.as<Table>().rows.size() == 3);
  CHECK(first.artifact.as<Table>().columns.size() == 2);
  CHECK_FALSE(first.warning);
  CHECK(text::read_file(dir.path / "files" / "a.csv") == "x,y\n1,2\n3,4\n5,6\n");

  const auto second = upload_file(pool, "a.csv", "x,y\n7,8\n", "text/csv", opts);
  CHECK(second.key == "a-2.csv");
  CHECK(pool.find("a-2.csv")->path == dir.path / "files" / "a-2.csv");
  CHECK(fs::exists(dir.path / "files" / "a-2.csv"));
}

TEST_CASE("upload: 10-row csv header survives linearization") {
  GroundingPool pool;
  const std::string csv = csv_of(10);
  upload_file(pool, "a.csv", csv, "");
  const std::string rendered = linearize(pool.find("a.csv")->artifact, 4000);
  // Oracle: split the file's first line on commas ourselves.
  std::vector<std::string> header;
  std::stringstream first_line(csv.substr(0, csv.find('\n')));
  for (std::string cell; std::getline(first_line, cell, ',');) header.push_back(cell);
  std::string expected;
  for (std::size_t i = 0; i < header.size(); ++i) expected += (i ? " | " : "") + header[i];
  CHECK(rendered.substr(0, rendered.find('\n')) == expected);
}

TEST_CASE("upload: content sniffing") {
  GroundingPool pool;
  const std::string png = std::string("\x89PNG\r\n\x1a\n", 8) + std::string(32, '\0');
  const auto img = upload_file(pool, "pic.bin", png, "application/octet-stream");
  CHECK(img.artifact.kind() == ArtifactKind::Image);
  CHECK(img.artifact.mime() == "image/png");
  CHECK(img.artifact.as<BlobRef>().data == png);

  const std::string db = std::string("SQLite format 3\0", 16) + std::string(100, '\x01');
  CHECK(upload_file(pool, "shop.db", db, "").artifact.kind() == ArtifactKind::DatabaseRef);

  const auto jl = upload_file(pool, "rows.jsonl", "{\"a\":1}\n{\"a\":2,\"b\":\"x\"}\n", "");
  REQUIRE(jl.artifact.kind() == ArtifactKind::Table);
  CHECK(jl.artifact.as<Table>().columns == std::vector<std::string>{"a", "b"});

  const auto other = upload_file(pool, "notes.txt", "hello", "text/plain");
  CHECK(other.artifact.kind() == ArtifactKind::FileRef);
  CHECK(other.artifact.mime() == "text/plain");
  CHECK(other.artifact.as<BlobRef>().uri == "grounding://notes.txt");
  CHECK(other.artifact.as<BlobRef>().size == 5);
}

TEST_CASE("upload: unreadable table falls back to a file reference with a warning") {
  GroundingPool pool;
  const auto r = upload_file(pool, "bad.csv", "a,b\n1,2,3\n\"open", "text/csv");
  CHECK(r.artifact.kind() == ArtifactKind::FileRef);
  REQUIRE(r.warning);
  CHECK(r.warning->find("bad.csv") != std::string::npos);
  CHECK(pool.contains("bad.csv"));
}

TEST_CASE("upload: size cap") {
  GroundingPool pool;
  UploadOptions opts;
  opts.cap = 10;
  CHECK(category_of([&] { upload_file(pool, "a.txt", std::string(11, 'x'), "", opts); }) == ErrorCategory::TooLarge);
  CHECK(pool.size() == 0);
  CHECK(upload_file(pool, "a.txt", std::string(10, 'x'), "", opts).key == "a.txt");
  CHECK(kDefaultUploadCap == 32ull * 1024 * 1024);
  CHECK(category_of([&] { upload_file(pool, "../x", "y", ""); }) == ErrorCategory::InvalidArgument);
}

TEST_CASE("document stores: put, get, overwrite and per-user queries") {
  TempDir dir;
  MemoryDocumentStore mem;
  FileDocumentStore file(dir.path / "db");
  for (DocumentStore* store : std::vector<DocumentStore*>{&mem, &file}) {
    store->put({"sessions", "s1", "alice", {{"n", 1}}});
    store->put({"sessions", "s2", "bob", {{"n", 2}}});
    store->put({"sessions", "s3", "alice", {{"n", 3}}});
    store->put({"sessions", "s1", "alice", {{"n", 10}}});  // overwrite keeps position
    store->put({"rounds", "s1/0", "alice", {{"r", 0}}});

    CHECK(store->get("sessions", "s1")->body == json{{"n", 10}});
    CHECK_FALSE(store->get("sessions", "nope"));
    CHECK_FALSE(store->get("rounds", "s1"));
    const auto alice = store->query_by_user("sessions", "alice");
    REQUIRE(alice.size() == 2);
    CHECK(alice[0].id == "s1");
    CHECK(alice[1].id == "s3");
    CHECK(store->query_by_user("sessions", "bob").size() == 1);
    CHECK(store->query_by_user("sessions", "carol").empty());
    CHECK(store->query_by_user("rounds", "alice").size() == 1);
  }
  // Reopen keeps the overwrite and the order.
  FileDocumentStore again(dir.path / "db");
  CHECK_FALSE(again.index_rebuilt());
  CHECK(again.get("sessions", "s1")->body == json{{"n", 10}});
  const auto alice = again.query_by_user("sessions", "alice");
  REQUIRE(alice.size() == 2);
  CHECK(alice[0].id == "s1");
}

TEST_CASE("file store: layout on disk") {
  TempDir dir;
  FileDocumentStore store(dir.path);
  store.put({"sessions", "s1", "ab", {{"x", 1}}});
  // user files are named by the hex of the user id
  const std::string content = text::read_file(dir.path / "users" / "6162.jsonl");
  REQUIRE(std::count(content.begin(), content.end(), '\n') == 1);
  const auto lines = text::split_lines(content);
  const json rec = json::parse(lines[0]);
  CHECK(rec["seq"] == 1);
  CHECK(rec["collection"] == "sessions");
  CHECK(rec["user_id"] == "ab");
  CHECK(rec["body"] == json{{"x", 1}});
  const json idx = json::parse(text::split_lines(text::read_file(dir.path / "index.jsonl"))[0]);
  CHECK(idx["file"] == "6162.jsonl");
  CHECK(idx["offset"] == 0);
  CHECK(idx["length"] == lines[0].size() + 1);
}

TEST_CASE("session: persist then reload gives an identical history") {
  TempDir dir;
  Session s = make_session("s1", "alice");
  upload_file(s.grounding, "a.csv", csv_of(3), "text/csv");
  {
    FileDocumentStore store(dir.path);
    Persistence p(store, std::chrono::milliseconds(50), false);
    CHECK(p.persist_session(s).durable);
    for (std::size_t i = 0; i < 4; ++i) {
      s.history.rounds.push_back(make_round(i, "alice"));
      CHECK(p.persist_round(s, s.history.rounds.back()).durable);
    }
  }
  FileDocumentStore store(dir.path);  // a fresh process would do the same
  const auto loaded = load_session(store, "s1");
  REQUIRE(loaded);
  CHECK(json(loaded->history).dump() == json(s.history).dump());
  CHECK(loaded->history == s.history);
  CHECK(loaded->selected_tools == s.selected_tools);
  CHECK(loaded->grounding.keys() == s.grounding.keys());
  CHECK(loaded->grounding.find("a.csv")->artifact == s.grounding.find("a.csv")->artifact);
  CHECK_FALSE(load_session(store, "s9"));
}

TEST_CASE("session: query by user returns only that user's sessions") {
  MemoryDocumentStore store;
  Persistence p(store, std::chrono::milliseconds(50), false);
  for (const auto& [id, user] : std::vector<std::pair<std::string, std::string>>{
           {"s1", "alice"}, {"s2", "bob"}, {"s3", "alice"}}) {
    Session s = make_session(id, user);
    p.persist_session(s);
    s.history.rounds.push_back(make_round(0, id));
    p.persist_round(s, s.history.rounds[0]);
  }
  const auto alice = load_user_sessions(store, "alice");
  REQUIRE(alice.size() == 2);
  CHECK(alice[0].id == "s1");
  CHECK(alice[1].id == "s3");
  CHECK(alice[1].history.rounds.at(0) == make_round(0, "s3"));
  CHECK(load_user_sessions(store, "bob").size() == 1);
}

TEST_CASE("session: rounds come back in index order") {
  MemoryDocumentStore store;
  Persistence p(store, std::chrono::milliseconds(50), false);
  Session s = make_session("s1", "u");
  p.persist_session(s);
  for (std::size_t i : {2u, 0u, 1u}) p.persist_round(s, make_round(i, "u"));
  const auto loaded = load_session(store, "s1");
  REQUIRE(loaded->history.rounds.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(loaded->history.rounds[i].index == i);
}

TEST_CASE("file store: kill-and-restart durability") {
  TempDir dir;
  int ack[2];
  REQUIRE(::pipe(ack) == 0);
  const pid_t pid = ::fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    ::close(ack[0]);
    FileDocumentStore store(dir.path);
    Session s = make_session("s1", "alice");
    store.put(session_document(s));
    for (std::uint32_t i = 0;; ++i) {
      store.put(round_document(s, make_round(i, "alice")));
      if (::write(ack[1], &i, sizeof i) != sizeof i) ::_exit(1);
    }
  }
  ::close(ack[1]);
  std::uint32_t last = 0;
  int acked = 0;
  while (acked < 40) {
    if (::read(ack[0], &last, sizeof last) != sizeof last) break;
    ++acked;
  }
  ::kill(pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);
  // Drain acknowledgements that raced the kill.
  while (::read(ack[0], &last, sizeof last) == sizeof last) ++acked;
  ::close(ack[0]);
  REQUIRE(acked >= 40);

  // Simulate a torn write on top of whatever the kill left behind.
  {
    std::ofstream torn(dir.path / "users" / "616c696365.jsonl", std::ios::app | std::ios::binary);
    torn << "{\"seq\": 999999, \"collection\": \"rou";
  }

  FileDocumentStore store(dir.path);
  const auto loaded = load_session(store, "s1");
  REQUIRE(loaded);
  REQUIRE(loaded->history.rounds.size() >= static_cast<std::size_t>(acked));
  for (std::size_t i = 0; i < loaded->history.rounds.size(); ++i)
    REQUIRE(loaded->history.rounds[i] == make_round(i, "alice"));

  // The recovered store keeps accepting writes after the cut.
  Session s = make_session("s1", "alice");
  const std::size_t next = loaded->history.rounds.size();
  store.put(round_document(s, make_round(next, "alice")));
  FileDocumentStore reopened(dir.path);
  CHECK(load_session(reopened, "s1")->history.rounds.size() == next + 1);
}

TEST_CASE("file store: lost or damaged index is rebuilt") {
  TempDir dir;
  {
    FileDocumentStore store(dir.path);
    for (int i = 0; i < 5; ++i) store.put({"rounds", "r" + std::to_string(i), "u", {{"i", i}}});
  }
  SUBCASE("missing") { fs::remove(dir.path / "index.jsonl"); }
  SUBCASE("truncated") { fs::resize_file(dir.path / "index.jsonl", 40); }
  SUBCASE("garbage") {
    std::ofstream(dir.path / "index.jsonl", std::ios::trunc) << "not json\n";
  }
  FileDocumentStore store(dir.path);
  CHECK(store.index_rebuilt());
  const auto docs = store.query_by_user("rounds", "u");
  REQUIRE(docs.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(docs[i].body["i"] == i);
}

TEST_CASE("file store: unwritable root reports StoreUnavailable") {
  TempDir dir;
  text::write_file(dir.path / "blocker", "x");
  CHECK(category_of([&] { FileDocumentStore store(dir.path / "blocker" / "db"); }) ==
        ErrorCategory::StoreUnavailable);
}

TEST_CASE("persistence: outage is queued, flagged and retried in order") {
  FlakyStore store;
  Persistence p(store, std::chrono::milliseconds(20), true);
  Session s = make_session("s1", "u");
  CHECK(p.persist_session(s).durable);
  CHECK(p.health().ok);

  store.down = true;
  const auto ack = p.persist_round(s, make_round(0, "u"));
  CHECK_FALSE(ack.durable);
  REQUIRE(ack.error);
  CHECK(ack.error->find("offline") != std::string::npos);
  CHECK_FALSE(p.persist_round(s, make_round(1, "u")).durable);
  auto h = p.health();
  CHECK_FALSE(h.ok);
  CHECK(h.pending == 2);
  CHECK(h.last_error == "backend offline");

  store.down = false;
  for (int i = 0; i < 200 && !p.health().ok; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  h = p.health();
  CHECK(h.ok);
  CHECK(h.pending == 0);
  CHECK_FALSE(h.last_error);
  REQUIRE(store.writes.size() == 3);
  CHECK(store.writes[1].id == "s1/0");
  CHECK(store.writes[2].id == "s1/1");
  CHECK(load_session(store, "s1")->history.rounds.size() == 2);
}

TEST_CASE("persistence: retry_now without a background thread") {
  FlakyStore store;
  Persistence p(store, std::chrono::milliseconds(20), false);
  store.down = true;
  Session s = make_session("s1", "u");
  CHECK_FALSE(p.persist_session(s).durable);
  CHECK_FALSE(p.retry_now());
  store.down = false;
  CHECK(p.retry_now());
  CHECK(store.get(kSessionsCollection, "s1"));
}

TEST_CASE("registry: ids, lookup and concurrent creation") {
  SessionRegistry seq(sequential_ids("sess-"));
  const auto a = seq.create("u", agent::AgentKind::Web, ToolSelection::auto_select(), "t");
  const auto b = seq.create("u", agent::AgentKind::Data, {}, "t");
  CHECK(a->session.id == "sess-1");
  CHECK(b->session.id == "sess-2");
  CHECK(seq.find("sess-1") == a);
  CHECK_FALSE(seq.find("sess-9"));
  CHECK(seq.adopt(make_session("sess-1", "other")) == a);  // never replaces
  CHECK(seq.erase("sess-2"));
  CHECK(seq.size() == 1);

  SessionRegistry reg;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 100; ++i) reg.create("u", agent::AgentKind::Data, {}, "t");
    });
  for (auto& t : threads) t.join();
  CHECK(reg.size() == 800);
  for (const auto& id : reg.ids()) CHECK(id.rfind("s_", 0) == 0);
}

TEST_CASE("tool selection json") {
  CHECK(json(ToolSelection::auto_select()) == "auto");
  CHECK(json(ToolSelection{false, {"a"}}) == json::array({"a"}));
  CHECK(json("auto").get<ToolSelection>().automatic);
  CHECK(category_of([] { (void)json(3).get<ToolSelection>(); }) == ErrorCategory::InvalidArgument);
}
