#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <set>

#include "../support/gateway_harness.hpp"
#include "agentrt/gateway/frames.hpp"
#include "agentrt/store/document_store.hpp"

using namespace agentrt;
using namespace agentrt::gateway;
using agentrt::testing::GatewayHarness;
using agentrt::testing::SseCapture;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = AGENTRT_FIXTURES;

std::vector<FrameEvent> events_of(const std::vector<Frame>& frames) {
  std::vector<FrameEvent> out;
  for (const auto& f : frames) out.push_back(f.event);
  return out;
}

std::string joined(const std::vector<Frame>& frames, FrameEvent e, const char* field = "text") {
  std::string s;
  for (const auto& f : frames)
    if (f.event == e) s += f.data[field].get<std::string>();
  return s;
}

json text_script(const std::string& channel, const std::string& text, std::size_t chunk = 0, int delay_ms = 0) {
  return json{{"entries",
               json::array({{{"channel", channel}, {"turn", "*"}, {"text", text}, {"chunk_size", chunk},
                             {"delay_ms", delay_ms}}})}};
}

class SpyDocuments : public store::DocumentStore {
 public:
  store::MemoryDocumentStore inner;
  std::vector<store::Document> writes;
  std::atomic<bool> down{false};
  std::mutex mu;
  void put(const store::Document& d) override {
    if (down) throw Error(ErrorCategory::StoreUnavailable, "spy store offline");
    std::lock_guard lock(mu);
    writes.push_back(d);
    inner.put(d);
  }
  std::optional<store::Document> get(const std::string& c, const std::string& id) override { return inner.get(c, id); }
  std::vector<store::Document> query_by_user(const std::string& c, const std::string& u) override {
    return inner.query_by_user(c, u);
  }
};

class SpyKV : public store::MemoryKVStore {
 public:
  std::vector<std::string> keys_written;
  std::mutex mu;
  void set(const std::string& key, std::string value, std::optional<std::chrono::milliseconds> ttl) override {
    {
      std::lock_guard lock(mu);
      keys_written.push_back(key);
    }
    MemoryKVStore::set(key, std::move(value), ttl);
  }
};

}  // namespace

// ---- frames ---------------------------------------------------------------

TEST_CASE("frames: wire encoding") {
  Frame f = *frame_for(parse::TextDelta{"Hi \"there\""});
  f.seq = 3;
  CHECK(encode_sse(f) == "event: text.delta\ndata: {\"v\":1,\"seq\":3,\"text\":\"Hi \\\"there\\\"\"}\n\n");
  Frame d = done_frame("cancelled");
  d.seq = 4;
  CHECK(encode_sse(d) == "event: done\ndata: {\"v\":1,\"seq\":4,\"ended_by\":\"cancelled\"}\n\n");
  Frame e = error_frame(ErrorCategory::AllKeysCooling, "all keys cooling");
  e.seq = 1;
  CHECK(encode_sse(e) ==
        "event: error\ndata: {\"v\":1,\"seq\":1,\"category\":\"all_keys_cooling\",\"message\":\"all keys cooling\"}\n\n");

  const auto parsed = parse_sse(encode_sse(f) + encode_sse(d));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].event == FrameEvent::TextDelta);
  CHECK(parsed[0].seq == 3);
  CHECK(parsed[0].data["text"] == "Hi \"there\"");
  CHECK(parsed[1].data["ended_by"] == "cancelled");
}

TEST_CASE("frames: role events map one to one") {
  CHECK(frame_for(parse::ThoughtDelta{"x"})->event == FrameEvent::ThoughtDelta);
  CHECK(frame_for(parse::ActionStart{})->event == FrameEvent::ActionStart);
  CHECK(frame_for(parse::ActionName{"sql"})->data["name"] == "sql");
  CHECK(frame_for(parse::ActionInputDelta{"{"})->event == FrameEvent::ActionInputDelta);
  CHECK_FALSE(frame_for(parse::ActionEnd{}));
  CHECK_FALSE(frame_for(parse::ParseWarning{}));
  for (auto e : {FrameEvent::TextDelta, FrameEvent::ThoughtDelta, FrameEvent::ActionStart, FrameEvent::ActionName,
                 FrameEvent::ActionInputDelta, FrameEvent::Observation, FrameEvent::Block, FrameEvent::Error,
                 FrameEvent::Done})
    CHECK(frame_event_from_string(to_string(e)) == e);
}

TEST_CASE("frames: grammar validator") {
  auto stream = [](std::vector<std::pair<std::string, json>> items) {
    std::string s;
    std::uint64_t seq = 0;
    for (auto& [ev, data] : items) {
      Frame f;
      f.event = frame_event_from_string(ev);
      f.seq = ++seq;
      f.data = nlohmann::ordered_json::parse(data.dump());
      s += encode_sse(f);
    }
    return parse_sse(s);
  };
  const json done = {{"ended_by", "final_answer"}};
  CHECK_FALSE(validate_frames(stream({{"text.delta", {{"text", "a"}}}, {"done", done}})));
  CHECK_FALSE(validate_frames(stream({{"action.start", json::object()},
                                      {"action.name", {{"name", "x"}}},
                                      {"action.input.delta", {{"text", "a"}}},
                                      {"action.input.delta", {{"text", "b"}}},
                                      {"observation", {{"tool", "x"}}},
                                      {"done", done}})));
  CHECK(validate_frames({}));
  CHECK(validate_frames(stream({{"text.delta", {{"text", "a"}}}})));                        // no done
  CHECK(validate_frames(stream({{"done", done}, {"text.delta", {{"text", "a"}}}})));        // done not last
  CHECK(validate_frames(stream({{"done", done}, {"done", done}})));                         // two dones
  CHECK(validate_frames(stream({{"action.name", {{"name", "x"}}}, {"done", done}})));      // name without start
  CHECK(validate_frames(stream({{"action.start", json::object()}, {"done", done}})));      // start without name
  CHECK(validate_frames(stream({{"action.input.delta", {{"text", "a"}}}, {"done", done}})));
  CHECK(validate_frames(stream({{"done", json::object()}})));
  auto gap = stream({{"text.delta", {{"text", "a"}}}, {"done", done}});
  gap[1].seq = 3;
  CHECK(validate_frames(gap));
  CHECK_THROWS(parse_sse("event: done\n\n"));
  CHECK_THROWS(parse_sse("event: done\ndata: [1]\n\n"));
}

// ---- sessions -------------------------------------------------------------

TEST_CASE("gateway: session creation") {
  GatewayHarness h({});
  auto c = h.client();
  auto r = c.Post("/sessions", R"({"profile": "data", "user_id": "u"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 201);
  CHECK(json::parse(r->body)["session_id"] == "sess-1");
  r = c.Post("/sessions", R"({"profile": "x"})", "application/json");
  CHECK(r->status == 400);
  CHECK(json::parse(r->body)["error"]["category"] == "invalid_argument");
  CHECK(c.Post("/sessions", "{not json", "application/json")->status == 400);
  CHECK(h.create("plugins") == "sess-2");
  CHECK(h.create("web") == "sess-3");
  CHECK(c.Post("/sessions/nope/messages", R"({"text": "hi"})", "application/json")->status == 404);
  CHECK(c.Post("/sessions/nope/stop", "", "application/json")->status == 404);
}

TEST_CASE("gateway: no-tool turn streams text then done") {
  GatewayHarness::Options o;
  o.script = text_script("data", "Hello! Upload a file and ask me about it.", 6);
  GatewayHarness h(o);
  const auto id = h.create("data");
  const auto cap = h.message(id, "hi");
  CHECK(cap.status == 200);
  const auto frames = parse_sse(cap.body);
  CHECK_FALSE(validate_frames(frames));
  REQUIRE(frames.size() >= 2);
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) CHECK(frames[i].event == FrameEvent::TextDelta);
  CHECK(joined(frames, FrameEvent::TextDelta) == "Hello! Upload a file and ask me about it.");
  CHECK(frames.back().data["ended_by"] == "final_answer");
}

TEST_CASE("gateway: golden transcripts") {
  const bool update = std::getenv("AGENTRT_UPDATE_GOLDEN") != nullptr;
  for (const std::string name : {"data", "plugins", "web"}) {
    CAPTURE(name);
    const auto cap = agentrt::testing::run_golden(kFixtures, name);
    CHECK(cap.status == 200);
    const auto frames = parse_sse(cap.body);
    const auto problem = validate_frames(frames);
    CHECK_MESSAGE(!problem, problem.value_or(""));
    const fs::path expected = kFixtures / "golden" / name / "expected.sse";
    if (update) text::write_file(expected, cap.body);
    REQUIRE(fs::exists(expected));
    CHECK(cap.body == text::read_file(expected));
    CHECK(frames.back().data["ended_by"] == "final_answer");
  }
}

TEST_CASE("gateway: plugins turn frame order") {
  const auto frames = parse_sse(agentrt::testing::run_golden(kFixtures, "plugins").body);
  // text.delta* action.start action.name action.input.delta+ observation text.delta+ done
  std::vector<FrameEvent> shape;
  for (auto e : events_of(frames))
    if (shape.empty() || shape.back() != e || e == FrameEvent::Observation) shape.push_back(e);
  CHECK(shape == std::vector<FrameEvent>{FrameEvent::TextDelta, FrameEvent::ActionStart, FrameEvent::ActionName,
                                         FrameEvent::ActionInputDelta, FrameEvent::Observation,
                                         FrameEvent::TextDelta, FrameEvent::Done});
  const auto obs = std::find_if(frames.begin(), frames.end(), [](auto& f) { return f.event == FrameEvent::Observation; });
  CHECK(obs->data["tool"] == "Klarna Shopping");
  CHECK(obs->data["status"] == "ok");
  CHECK(obs->data["blocks"][0]["block_type"] == "table");
  CHECK(joined(frames, FrameEvent::ActionName, "name") == "Klarna Shopping");
}

TEST_CASE("gateway: web turn streams step cards") {
  const auto frames = parse_sse(agentrt::testing::run_golden(kFixtures, "web").body);
  std::vector<json> cards;
  for (const auto& f : frames)
    if (f.event == FrameEvent::Block && f.data["block"]["payload"].value("kind", "") == "webot_step")
      cards.push_back(json::parse(f.data["block"].dump()));
  REQUIRE(cards.size() == 4);
  CHECK(cards[0]["payload"]["action"] == "setValue(2, \"New York\")");
  CHECK(cards[3]["payload"]["ok"] == true);
  const auto obs = std::find_if(frames.begin(), frames.end(), [](auto& f) { return f.event == FrameEvent::Observation; });
  CHECK(obs->data["blocks"][0]["payload"]["text"].get<std::string>().rfind("WeBot finished the task in 4 steps.", 0) ==
        0);
}

TEST_CASE("gateway: data turn carries code and console blocks") {
  const auto frames = parse_sse(agentrt::testing::run_golden(kFixtures, "data").body);
  std::vector<std::string> obs_tools;
  std::string console;
  for (const auto& f : frames)
    if (f.event == FrameEvent::Observation) {
      obs_tools.push_back(f.data["tool"]);
      for (const auto& b : f.data["blocks"])
        if (b["block_type"] == "console") console = b["payload"]["text"];
    }
  CHECK(obs_tools == std::vector<std::string>{"data_profiling", "python"});
  CHECK(console == "1234.5\n");
}

// ---- busy, stop, errors -----------------------------------------------------

TEST_CASE("gateway: a busy session answers 409") {
  GatewayHarness::Options o;
  o.script = text_script("data", std::string(60, 'x'), 2, 20);
  GatewayHarness h(o);
  const auto id = h.create("data");
  std::atomic<bool> first_chunk{false};
  std::thread t([&] {
    h.message(id, "go", [&](const std::string&) {
      first_chunk = true;
      return true;
    });
  });
  while (!first_chunk) std::this_thread::sleep_for(std::chrono::milliseconds(2));
  auto r = h.client().Post("/sessions/" + id + "/messages", R"({"text": "again"})", "application/json");
  CHECK(r->status == 409);
  CHECK(h.upload(id, "a.csv", "a\n1\n", "text/csv").first == 409);
  CHECK(h.put_tools(id, "auto").first == 409);
  t.join();
  CHECK(h.message(id, "after").status == 200);
}

TEST_CASE("gateway: concurrent turns on one session serialize, other sessions proceed") {
  GatewayHarness::Options o;
  o.script = text_script("data", "ok ok ok ok", 3, 5);
  GatewayHarness h(o);
  const auto a = h.create("data");
  const auto b = h.create("data");
  std::atomic<int> ok_a{0}, busy_a{0}, ok_b{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&] {
      const auto cap = h.message(a, "hi");
      if (cap.status == 200) {
        CHECK_FALSE(validate_frames(parse_sse(cap.body)));
        ++ok_a;
      } else if (cap.status == 409) {
        ++busy_a;
      }
    });
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&] {
      for (int k = 0; k < 2; ++k) {
        const std::string other = h.create("data");
        if (h.message(other, "hi").status == 200) ++ok_b;
      }
    });
  for (auto& t : threads) t.join();
  CHECK(ok_a + busy_a == 8);
  CHECK(ok_a >= 1);
  CHECK(ok_b == 8);
  // every admitted turn on `a` left exactly one round
  const auto hist = json::parse(h.client().Get("/sessions/" + a + "/history")->body);
  CHECK(hist["history"]["rounds"].size() == static_cast<std::size_t>(ok_a.load()));
  (void)b;
}

TEST_CASE("gateway: stop mid-stream ends with a cancelled done within one frame") {
  GatewayHarness::Options o;
  o.script = text_script("data", std::string(400, 'y'), 4, 10);
  GatewayHarness h(o);
  const auto id = h.create("data");

  CHECK(json::parse(h.client().Post("/sessions/" + id + "/stop", "", "text/plain")->body)["stopped"] == false);

  std::mutex mu;
  std::string received;
  std::atomic<std::size_t> frames_seen{0};
  std::thread t([&] {
    h.message(id, "stream please", [&](const std::string& chunk) {
      std::lock_guard lock(mu);
      received += chunk;
      frames_seen = parse_sse(received).size();
      return true;
    });
  });
  while (frames_seen < 3) std::this_thread::sleep_for(std::chrono::milliseconds(2));
  auto r1 = h.client().Post("/sessions/" + id + "/stop", "", "text/plain");
  std::size_t at_stop = 0;
  {
    std::lock_guard lock(mu);
    at_stop = parse_sse(received).size();
  }
  auto r2 = h.client().Post("/sessions/" + id + "/stop", "", "text/plain");
  t.join();
  CHECK(json::parse(r1->body)["stopped"] == true);
  CHECK(json::parse(r2->body)["stopped"] == false);

  const auto frames = parse_sse(received);
  CHECK_FALSE(validate_frames(frames));
  CHECK(frames.back().event == FrameEvent::Done);
  CHECK(frames.back().data["ended_by"] == "cancelled");
  // at most one frame was in flight when the stop landed
  CHECK(frames.size() <= at_stop + 2);
  CHECK(joined(frames, FrameEvent::TextDelta).size() < 400);

  // the partial round is kept and the session is usable again
  const auto hist = json::parse(h.client().Get("/sessions/" + id + "/history")->body);
  CHECK(hist["history"]["rounds"].size() == 1);
  CHECK(json::parse(h.client().Post("/sessions/" + id + "/stop", "", "text/plain")->body)["stopped"] == false);
}

TEST_CASE("gateway: provider failure becomes an error frame then done") {
  GatewayHarness::Options o;
  o.script = json{{"entries", json::array({{{"channel", "data"}, {"turn", "*"}, {"error", "server_error"}}})}};
  GatewayHarness h(o);
  const auto id = h.create("data");
  const auto frames = parse_sse(h.message(id, "hi").body);
  CHECK_FALSE(validate_frames(frames));
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].event == FrameEvent::Error);
  CHECK(frames[0].data["category"] == "server_error");
  CHECK(frames[1].data["ended_by"] == "error");
}

TEST_CASE("gateway: all keys cooling surfaces as a categorized error frame") {
  GatewayHarness::Options o;
  o.keys = {"k1", "k2", "k3"};
  o.script = json{{"entries", json::array({{{"channel", "data"}, {"turn", "*"}, {"text", "never"},
                                             {"reject_keys", {"k1", "k2", "k3"}}}})}};
  GatewayHarness h(o);
  const auto id = h.create("data");
  const auto frames = parse_sse(h.message(id, "hi").body);
  CHECK_FALSE(validate_frames(frames));
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].data["category"] == "all_keys_cooling");
  CHECK(frames[1].data["ended_by"] == "error");
}

// ---- tools and files --------------------------------------------------------

TEST_CASE("gateway: tool listing and selection") {
  GatewayHarness::Options o;
  o.catalog_dir = kFixtures / "catalog";
  GatewayHarness h(o);
  const auto tools = json::parse(h.client().Get("/tools")->body)["tools"];
  std::set<std::string> names;
  for (const auto& t : tools) {
    names.insert(t["name"].get<std::string>());
    CHECK_FALSE(t["description"].get<std::string>().empty());
  }
  for (const auto* n : {"Klarna Shopping", "python", "sql", "data_profiling", "chart", "dataset_search", "WeBot"})
    CHECK(names.count(n));

  const auto id = h.create("plugins");
  auto [s1, b1] = h.put_tools(id, json::array({"Klarna Shopping"}));
  CHECK(s1 == 200);
  CHECK(b1["selected"] == json::array({"Klarna Shopping"}));
  auto [s2, b2] = h.put_tools(id, "auto");
  CHECK(s2 == 200);
  CHECK(b2["selected"] == "auto");
  auto [s3, b3] = h.put_tools(id, json{{"names", {"Klarna Shopping", "Nope"}}});
  CHECK(s3 == 400);
  CHECK(b3["error"]["message"].get<std::string>().find("Nope") != std::string::npos);
  CHECK(h.put_tools(id, 5).first == 400);
  CHECK(h.put_tools("missing", "auto").first == 404);
}

TEST_CASE("gateway: auto selection picks tools per turn") {
  GatewayHarness::Options o;
  o.catalog_dir = kFixtures / "catalog";
  o.script = text_script("plugins", "Sure.");
  GatewayHarness h(o);
  const auto id = h.create("plugins");  // plugins sessions start on auto
  h.message(id, "compare prices from online shops");
  const auto reqs = h.provider().requests();
  REQUIRE(reqs.size() == 1);
  const std::string prompt = reqs[0].prompt_text();
  CHECK(prompt.find("Klarna Shopping") != std::string::npos);
  // builtin data tools are never offered to a plugins session
  CHECK(prompt.find("data_profiling") == std::string::npos);
}

TEST_CASE("gateway: file upload") {
  GatewayHarness::Options o;
  o.upload_cap = 64;
  GatewayHarness h(o);
  const auto id = h.create("data");
  auto [s1, b1] = h.upload(id, "a.csv", "x,y\n1,2\n3,4\n5,6\n7,8\n9,10\n11,12\n", "text/csv");
  CHECK(s1 == 201);
  CHECK(b1["name"] == "a.csv");
  CHECK(b1["kind"] == "table");
  CHECK(b1["preview"]["block_type"] == "table");
  CHECK(b1["preview"]["payload"]["rows"].size() == 5);
  auto [s2, b2] = h.upload(id, "a.csv", "x\n1\n", "text/csv");
  CHECK(s2 == 201);
  CHECK(b2["name"] == "a-2.csv");
  auto [s3, b3] = h.upload(id, "big.txt", std::string(65, 'z'), "text/plain");
  CHECK(s3 == 413);
  CHECK(b3["error"]["category"] == "too_large");
  auto [s4, b4] = h.upload(id, "bad.csv", "a,b\n1\n", "text/csv");
  CHECK(s4 == 201);
  CHECK(b4["kind"] == "file_ref");
  CHECK(b4.contains("warning"));
  auto r = h.client().Post("/sessions/" + id + "/files", "plain", "text/plain");
  CHECK(r->status == 400);
  const auto hist = json::parse(h.client().Get("/sessions/" + id + "/history")->body);
  CHECK(hist["grounding"] == json::array({"a.csv", "a-2.csv", "bad.csv"}));
}

// ---- persistence --------------------------------------------------------------

TEST_CASE("gateway: restart reconstructs history byte-identically") {
  agentrt::testing::ScopedTemp dir;
  std::string before, id;
  {
    GatewayHarness::Options o;
    o.documents = std::make_shared<store::FileDocumentStore>(dir.path);
    o.script = text_script("data", "First answer.", 5);
    GatewayHarness h(o);
    id = h.create("data", "alice");
    h.upload(id, "t.csv", "a,b\n1,2\n", "text/csv");
    h.message(id, "one");
    h.message(id, "two");
    before = json::parse(h.client().Get("/sessions/" + id + "/history")->body).dump();
  }
  GatewayHarness::Options o;
  o.documents = std::make_shared<store::FileDocumentStore>(dir.path);
  o.script = text_script("data", "Third.", 5);
  GatewayHarness h(o);
  const std::string after = json::parse(h.client().Get("/sessions/" + id + "/history")->body).dump();
  CHECK(after == before);
  // and the restored session continues, with artifact ids still increasing
  CHECK(h.message(id, "three").status == 200);
  const auto hist = json::parse(h.client().Get("/sessions/" + id + "/history")->body)["history"]["rounds"];
  REQUIRE(hist.size() == 3);
  CHECK(hist[2]["messages"][0]["blocks"][0]["id"].get<std::uint64_t>() >
        hist[1]["messages"].back()["blocks"][0]["id"].get<std::uint64_t>());
}

TEST_CASE("gateway: per-turn temporaries never reach the stores") {
  auto docs = std::make_shared<SpyDocuments>();
  auto kv = std::make_shared<SpyKV>();
  for (const std::string name : {"data", "plugins", "web"}) {
    const json sc = json::parse(text::read_file(kFixtures / "golden" / name / "scenario.json"));
    GatewayHarness::Options o;
    o.documents = docs;
    o.kv = kv;
    o.script = sc["script"];
    if (sc.value("catalog", false)) o.catalog_dir = kFixtures / "catalog";
    if (sc.contains("site")) o.site_dir = kFixtures / "sites" / sc["site"].get<std::string>();
    o.default_start_url = sc.value("start_url", "");
    o.mock_shop = sc.value("mock_shop", false);
    GatewayHarness h(o);
    const auto id = h.create(sc["profile"], sc["user_id"]);
    if (sc.contains("tools")) h.put_tools(id, sc["tools"]);
    for (const auto& u : sc.value("uploads", json::array())) h.upload(id, u["name"], u["content"], u["mime"]);
    h.message(id, sc["message"]);
  }
  REQUIRE_FALSE(docs->writes.empty());
  std::size_t rounds = 0;
  for (const auto& d : docs->writes) {
    CHECK((d.collection == store::kSessionsCollection || d.collection == store::kRoundsCollection));
    if (d.collection == store::kRoundsCollection) {
      ++rounds;
      // only the round itself: no frames, sequence numbers or parser state
      CHECK(d.body.size() == 2);
      CHECK(d.body.contains("session_id"));
      CHECK(d.body.contains("round"));
      const std::string dumped = d.body.dump();
      CHECK(dumped.find("\"seq\"") == std::string::npos);
      CHECK(dumped.find("text.delta") == std::string::npos);
    }
  }
  CHECK(rounds == 3);
  CHECK(kv->keys_written.empty());
}

TEST_CASE("gateway: store outage still answers, flags health, then recovers") {
  auto docs = std::make_shared<SpyDocuments>();
  GatewayHarness::Options o;
  o.documents = docs;
  o.script = text_script("data", "Still here.", 4);
  GatewayHarness h(o);
  const auto id = h.create("data");
  docs->down = true;
  const auto frames = parse_sse(h.message(id, "hi").body);
  CHECK(frames.back().data["ended_by"] == "final_answer");
  auto health = json::parse(h.client().Get("/healthz")->body);
  CHECK(health["status"] == "degraded");
  CHECK(health["store"]["pending"] == 1);
  CHECK(health["store"]["last_error"] == "spy store offline");
  docs->down = false;
  for (int i = 0; i < 200 && health["status"] != "ok"; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    health = json::parse(h.client().Get("/healthz")->body);
  }
  CHECK(health["status"] == "ok");
  CHECK(docs->inner.get(store::kRoundsCollection, id + "/0"));
}

TEST_CASE("gateway: health and catalog reload") {
  auto kv = std::make_shared<SpyKV>();
  GatewayHarness::Options o;
  o.catalog_dir = kFixtures / "catalog";
  o.kv = kv;
  GatewayHarness h(o);
  const auto health = json::parse(h.client().Get("/healthz")->body);
  CHECK(health["status"] == "ok");
  CHECK(health["tools"].get<int>() >= 8);
  auto r = h.client().Post("/admin/reload-catalog", "", "text/plain");
  REQUIRE(r->status == 200);
  const auto body = json::parse(r->body);
  CHECK(body["loaded"].size() == 2);
  CHECK(body["version"] == 1);
  CHECK(json::parse(h.client().Post("/admin/reload-catalog", "", "text/plain")->body)["version"] == 2);
  CHECK(kv->keys_written == std::vector<std::string>{"catalog:version", "catalog:version"});

  GatewayHarness bare({});
  CHECK(bare.client().Post("/admin/reload-catalog", "", "text/plain")->status == 400);
}

TEST_CASE("gateway: shutdown drains in-flight turns with cancelled done") {
  GatewayHarness::Options o;
  o.script = text_script("data", std::string(400, 'z'), 4, 10);
  GatewayHarness h(o);
  const auto id = h.create("data");
  std::atomic<bool> started{false};
  SseCapture cap;
  std::thread t([&] {
    cap = h.message(id, "long", [&](const std::string&) {
      started = true;
      return true;
    });
  });
  while (!started) std::this_thread::sleep_for(std::chrono::milliseconds(2));
  h.gateway().shutdown(std::chrono::seconds(5));
  t.join();
  const auto frames = parse_sse(cap.body);
  CHECK_FALSE(validate_frames(frames));
  CHECK(frames.back().data["ended_by"] == "cancelled");
  CHECK(h.client().Post("/sessions/" + id + "/messages", R"({"text": "x"})", "application/json")->status == 409);
}
