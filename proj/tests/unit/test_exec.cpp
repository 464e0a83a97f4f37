#include <doctest.h>
#include <httplib.h>
#include <signal.h>
#include <sqlite3.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "agentrt/core/text.hpp"
#include "agentrt/exec/chart.hpp"
#include "agentrt/exec/code.hpp"
#include "agentrt/exec/dataset.hpp"
#include "agentrt/exec/profile.hpp"
#include "agentrt/exec/sandbox.hpp"
#include "agentrt/exec/sql.hpp"
#include "agentrt/llm/scripted_provider.hpp"

using namespace agentrt;
using namespace agentrt::exec;
using namespace std::chrono_literals;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string t = (fs::temp_directory_path() / "agentrt-test-XXXXXX").string();
    REQUIRE(mkdtemp(t.data()));
    path = t;
  }
  ~TempDir() { fs::remove_all(path); }
};

void sql_exec(const fs::path& db, const std::string& sql) {
  sqlite3* h = nullptr;
  REQUIRE(sqlite3_open(db.c_str(), &h) == SQLITE_OK);
  char* err = nullptr;
  const int rc = sqlite3_exec(h, sql.c_str(), nullptr, nullptr, &err);
  INFO((err ? err : ""));
  sqlite3_free(err);
  sqlite3_close(h);
  REQUIRE(rc == SQLITE_OK);
}

// Oracle: a direct engine query returning the first cell as text.
std::string sql_scalar(const fs::path& db, const std::string& sql) {
  sqlite3* h = nullptr;
  sqlite3_open(db.c_str(), &h);
  sqlite3_stmt* st = nullptr;
  sqlite3_prepare_v2(h, sql.c_str(), -1, &st, nullptr);
  std::string out;
  if (sqlite3_step(st) == SQLITE_ROW) out = reinterpret_cast<const char*>(sqlite3_column_text(st, 0));
  sqlite3_finalize(st);
  sqlite3_close(h);
  return out;
}

struct Llm {
  llm::ScriptedProvider provider;
  llm::KeyPool pool{{"k"}};
  llm::LlmClient client;
  Llm() {
    client.provider = &provider;
    client.pool = &pool;
    client.model_id = "test";
  }
  void add(const std::string& channel, int turn, const std::string& text) {
    llm::ScriptedProvider::Entry e;
    e.channel = channel;
    e.turn = turn;
    e.text = text;
    e.chunk_size = 9;
    provider.add(e);
  }
};

SandboxLimits limits(std::chrono::milliseconds wall = 5s) {
  SandboxLimits l;
  l.wall_clock = wall;
  return l;
}

std::size_t workspace_count(const fs::path& root) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(root))
    if (e.path().filename().string().rfind("agentrt-ws-", 0) == 0) ++n;
  return n;
}

bool process_gone(int pid) {
  if (kill(pid, 0) != 0) return true;
  // A zombie awaiting a reaper outside our control no longer runs.
  std::ifstream stat("/proc/" + std::to_string(pid) + "/stat");
  std::string line;
  std::getline(stat, line);
  const auto close = line.rfind(')');
  return close != std::string::npos && close + 2 < line.size() && line[close + 2] == 'Z';
}

}  // namespace

TEST_CASE("sandbox: plain run, exit codes and limit validation") {
  auto r = run_sandboxed("print(1+1)\n", limits());
  CHECK(r.stdout_text == "2\n");
  CHECK(r.exit.kind == ExitKind::Ok);
  CHECK(r.produced_artifacts.empty());

  r = run_sandboxed("import sys\nsys.stderr.write('bad')\nsys.exit(3)\n", limits());
  CHECK(r.exit == ExitStatus{ExitKind::NonZero, 3, ErrorCategory::Internal});
  CHECK(r.stderr_text == "bad");

  SandboxLimits bad;
  bad.output_cap = 0;
  CHECK_THROWS_AS(run_sandboxed("pass", bad), Error);
  SandboxLimits d;
  CHECK(d.network == NetworkPolicy::Denied);
}

TEST_CASE("sandbox: a busy loop is killed within the wall clock plus grace") {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_sandboxed("while True:\n    pass\n", limits(2s));
  const auto took = std::chrono::steady_clock::now() - start;
  CHECK(r.exit.kind == ExitKind::Killed);
  CHECK(r.exit.limit == ErrorCategory::TimeLimit);
  CHECK(took >= 2s);
  CHECK(took < 3s);
}

TEST_CASE("sandbox: output cap truncates at exactly the byte bound") {
  for (const std::uint64_t cap : {1ull, 100ull, 4096ull, 10000ull}) {
    auto l = limits();
    l.output_cap = cap;
    const auto r = run_sandboxed("import sys\nsys.stdout.write('a' * 100000)\n", l);
    CHECK(r.stdout_text.size() == cap);
    CHECK(r.exit.limit == ErrorCategory::OutputLimit);
    CHECK(r.exit.kind == ExitKind::Killed);
  }
  auto l = limits();
  l.output_cap = 500;
  const auto exact = run_sandboxed("import sys\nsys.stdout.write('b' * 500)\n", l);
  CHECK(exact.stdout_text == std::string(500, 'b'));
  CHECK(exact.exit.kind == ExitKind::Ok);
}

TEST_CASE("sandbox: memory limit") {
  auto l = limits();
  l.memory = 256ull << 20;
  const auto r = run_sandboxed("x = bytearray(1 << 30)\nprint(len(x))\n", l);
  CHECK(r.exit.kind == ExitKind::Killed);
  CHECK(r.exit.limit == ErrorCategory::MemoryLimit);
  CHECK(r.stdout_text.empty());
}

TEST_CASE("sandbox: denied network blocks a connect probe, allow-list does not") {
  httplib::Server srv;
  srv.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content("hi", "text/plain"); });
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread th([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  const std::string probe = "import socket\ntry:\n"
                            "    s = socket.create_connection(('127.0.0.1', " + std::to_string(port) + "), timeout=2)\n"
                            "    print('connected')\nexcept OSError as e:\n    print('blocked', e.errno)\n";
  const auto denied = run_sandboxed(probe, limits());
  CHECK(denied.stdout_text == "blocked 13\n");
  auto open = limits();
  open.network = NetworkPolicy::AllowList;
  open.allow_hosts = {"127.0.0.1"};
  CHECK(run_sandboxed(probe, open).stdout_text == "connected\n");
  srv.stop();
  th.join();
}

TEST_CASE("sandbox: new files become artifacts (filesystem-diff oracle)") {
  TempDir root, src;
  text::write_file(src.path / "sales.csv", "region,amount\neast,3\nwest,5\n");
  SandboxOptions opts;
  opts.work_root = root.path;
  const std::string program =
      "import os, csv\n"
      "rows = list(csv.DictReader(open('inputs/sales.csv')))\n"
      "print(sum(int(r['amount']) for r in rows))\n"
      "open('plot.png', 'wb').write(b'\\x89PNG\\r\\n\\x1a\\n')\n"
      "open('outputs/summary.csv', 'w').write('total\\n8\\n')\n"
      "open('outputs/notes.txt', 'w').write('fine')\n"
      "os.makedirs('outputs/deep', exist_ok=True)\n"
      "open('outputs/deep/raw.bin', 'wb').write(b'\\x00\\x01')\n"
      "for dirpath, _, files in os.walk('.'):\n"
      "    for f in sorted(files):\n"
      "        print(os.path.join(dirpath, f))\n";
  const auto r = run_sandboxed(program, limits(), {{"sales.csv", src.path / "sales.csv"}}, opts);
  REQUIRE(r.exit.kind == ExitKind::Ok);
  // Oracle: the program's own listing of the tree, minus inputs and itself.
  std::set<std::string> expected;
  for (const auto& line : text::split_lines(r.stdout_text)) {
    if (line.rfind("./", 0) != 0) continue;
    const auto rel = line.substr(2);
    if (rel.rfind("inputs/", 0) == 0 || rel == ".agentrt_main.py") continue;
    expected.insert(rel);
  }
  std::set<std::string> got;
  for (const auto& a : r.produced_artifacts) got.insert(*a.name());
  CHECK(got == expected);
  CHECK(got.size() == 4);
  CHECK(text::split_lines(r.stdout_text)[0] == "8");

  for (const auto& a : r.produced_artifacts) {
    if (*a.name() == "plot.png") {
      CHECK(a.kind() == datamodel::ArtifactKind::Image);
      CHECK(a.as<datamodel::BlobRef>().data == std::string("\x89PNG\r\n\x1a\n", 8));
    } else if (*a.name() == "outputs/summary.csv") {
      CHECK(a.kind() == datamodel::ArtifactKind::Table);
      CHECK(a.as<datamodel::Table>().rows[0][0] == 8);
    } else {
      CHECK(a.kind() == datamodel::ArtifactKind::FileRef);
    }
  }
  CHECK(workspace_count(root.path) == 0);
}

TEST_CASE("sandbox: no processes or workspaces survive a run") {
  TempDir root;
  SandboxOptions opts;
  opts.work_root = root.path;
  const auto r = run_sandboxed(
      "import subprocess\np = subprocess.Popen(['sleep', '30'])\nprint(p.pid, flush=True)\n", limits(), {}, opts);
  REQUIRE(r.exit.kind == ExitKind::Ok);
  const int child = std::stoi(r.stdout_text);
  bool gone = false;
  for (int i = 0; i < 50 && !gone; ++i) {
    gone = process_gone(child);
    if (!gone) std::this_thread::sleep_for(20ms);
  }
  CHECK(gone);
  CHECK(workspace_count(root.path) == 0);

  // Same audit after a kill.
  run_sandboxed("import subprocess\nsubprocess.Popen(['sleep', '30'])\nwhile True: pass\n", limits(1s), {}, opts);
  CHECK(workspace_count(root.path) == 0);
}

TEST_CASE("sandbox: cancellation and a missing interpreter") {
  CancelToken cancel;
  std::thread t([&] {
    std::this_thread::sleep_for(200ms);
    cancel.cancel();
  });
  const auto start = std::chrono::steady_clock::now();
  try {
    run_sandboxed("while True: pass\n", limits(10s), {}, {}, cancel);
    FAIL("expected Interrupted");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Interrupted);
  }
  t.join();
  CHECK(std::chrono::steady_clock::now() - start < 2s);

  SandboxOptions opts;
  opts.interpreter = "no-such-python-interpreter";
  try {
    run_sandboxed("pass", limits(), {}, opts);
    FAIL("expected InterpreterMissing");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::InterpreterMissing);
  }
  CHECK_THROWS_AS(probe_interpreter("no-such-python-interpreter"), Error);
  CHECK_NOTHROW(probe_interpreter());
}

TEST_CASE("build_and_run_code: generated program runs in the sandbox") {
  Llm llm;
  llm.add(kCodeChannel, 0, "Here you go:\n```python\nprint(1+1)\n```\n");
  llm.add(kCodeChannel, 1, "```python\nopen('plot.png', 'wb').write(b'png')\n```");
  llm.add(kCodeChannel, 2, "```python\nwhile True:\n    pass\n```");
  auto run = build_and_run_code("add one and one", {}, llm.client, limits());
  CHECK(run.code == "print(1+1)\n");
  CHECK(run.result.stdout_text == "2\n");
  CHECK(run.result.exit.kind == ExitKind::Ok);

  run = build_and_run_code("plot it", {}, llm.client, limits());
  REQUIRE(run.result.produced_artifacts.size() == 1);
  CHECK(run.result.produced_artifacts[0].kind() == datamodel::ArtifactKind::Image);

  const auto start = std::chrono::steady_clock::now();
  run = build_and_run_code("spin", {}, llm.client, limits(2s));
  CHECK(run.result.exit.limit == ErrorCategory::TimeLimit);
  CHECK(std::chrono::steady_clock::now() - start < 3s);

  CHECK(extract_code("print(3)") == "print(3)");
  CHECK(extract_code("```\nx=1\n```\n```python\ny=2\n```") == "y=2\n");
}

TEST_CASE("sql: keyword policy") {
  CHECK(first_keyword("  -- note\n /* block */ select 1") == "SELECT");
  CHECK(first_keyword("WITH x AS (SELECT 1) SELECT * FROM x") == "WITH");
  CHECK(first_keyword("/* unterminated") == "");
  CHECK(first_keyword("\n\tDrop table t") == "DROP");
}

TEST_CASE("sql: three-row table against the direct-engine oracle") {
  TempDir dir;
  const auto db = dir.path / "s.db";
  sql_exec(db, "CREATE TABLE t(a INTEGER); INSERT INTO t VALUES (1),(2),(3);");
  SqlEngine engine(db);

  Llm llm;
  llm.add(kSqlChannel, 0, "SQLQuery: SELECT COUNT(*) FROM \"t\"\nSQLResult:");
  llm.add(kSqlChannel, 1, " There are 3 rows.");
  const auto ans = sql_answer("how many rows", engine.table_info(), "SQLite", llm.client, engine);
  CHECK(ans.sql == "SELECT COUNT(*) FROM \"t\"");
  REQUIRE(ans.outcome.rows.size() == 1);
  CHECK(datamodel::cell_text(ans.outcome.rows[0][0]) == sql_scalar(db, "SELECT COUNT(*) FROM t"));
  CHECK(ans.answer.find('3') != std::string::npos);
  const auto reqs = llm.provider.requests();
  REQUIRE(reqs.size() == 2);
  CHECK(reqs[0].prompt_text().find("CREATE TABLE t(a INTEGER)") != std::string::npos);
  CHECK(reqs[0].prompt_text().find("Question: how many rows") != std::string::npos);
  CHECK(reqs[1].prompt_text().find("SQLResult: COUNT(*)\n3") != std::string::npos);
  CHECK(reqs[1].prompt_text().size() > reqs[0].prompt_text().size());

  const auto sum = engine.query("SELECT SUM(a), MAX(a) FROM \"t\"");
  CHECK(datamodel::cell_text(sum.rows[0][0]) == sql_scalar(db, "SELECT SUM(a) FROM t"));
  CHECK(engine.tables() == std::vector<std::string>{"t"});
}

TEST_CASE("sql: writes, trailing statements and syntax errors are refused") {
  TempDir dir;
  const auto db = dir.path / "s.db";
  sql_exec(db, "CREATE TABLE t(a INTEGER); INSERT INTO t VALUES (1),(2),(3);");
  SqlEngine engine(db);
  auto category = [&](const std::string& sql) {
    try {
      engine.query(sql);
    } catch (const Error& e) {
      return e.category();
    }
    return ErrorCategory::Internal;
  };
  CHECK(category("DROP TABLE t") == ErrorCategory::NonSelectRejected);
  CHECK(category("INSERT INTO t VALUES (4)") == ErrorCategory::NonSelectRejected);
  CHECK(category("/* hi */ delete from t") == ErrorCategory::NonSelectRejected);
  CHECK(category("SELECT 1; DROP TABLE t") == ErrorCategory::NonSelectRejected);
  CHECK(category("WITH x AS (SELECT 1) DELETE FROM t") == ErrorCategory::NonSelectRejected);
  CHECK(category("SELECT nope FROM t") == ErrorCategory::SqlSyntaxError);
  CHECK_NOTHROW(engine.query("SELECT a FROM t; -- done"));
  CHECK(sql_scalar(db, "SELECT COUNT(*) FROM t") == "3");

  Llm llm;
  llm.add(kSqlChannel, 0, "SQLQuery: DROP TABLE t");
  try {
    sql_answer("drop it", "", "SQLite", llm.client, engine);
    FAIL("expected NonSelectRejected");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::NonSelectRejected);
  }
  CHECK(sql_scalar(db, "SELECT COUNT(*) FROM t") == "3");

  CHECK_THROWS_AS(SqlEngine(dir.path / "missing.db"), Error);
  text::write_file(dir.path / "junk.db", std::string(4096, 'j'));
  try {
    SqlEngine junk(dir.path / "junk.db");
    FAIL("expected UnreadableContent");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::UnreadableContent);
  }
}

TEST_CASE("sql: fuzzed statements only run when they start with SELECT or WITH") {
  TempDir dir;
  const auto db = dir.path / "s.db";
  sql_exec(db, "CREATE TABLE t(a INTEGER); INSERT INTO t VALUES (1),(2),(3);");
  SqlEngine engine(db);
  const std::vector<std::string> heads = {"SELECT", "select", "WITH", "DROP", "INSERT", "UPDATE", "DELETE",
                                          "PRAGMA", "ATTACH", "CREATE", "REPLACE", "VACUUM", "ALTER"};
  const std::vector<std::string> prefixes = {"", " ", "\n\t", "-- c\n", "/* c */", "/**/ -- x\n  "};
  const std::vector<std::string> bodies = {" a FROM t", " * FROM t", " x AS (SELECT 1) SELECT * FROM x",
                                           " TABLE t", " INTO t VALUES (9)", " t SET a = 0", " FROM t",
                                           " query_only = 0", " DATABASE ':memory:' AS m"};
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto head = heads[rng() % heads.size()];
    const auto sql = prefixes[rng() % prefixes.size()] + head + bodies[rng() % bodies.size()];
    const auto kw = text::to_lower(head);
    bool ran = true;
    try {
      engine.query(sql);
    } catch (const Error& e) {
      ran = false;
      if (kw != "select" && kw != "with") CHECK(e.category() == ErrorCategory::NonSelectRejected);
    }
    if (ran) CHECK_MESSAGE((kw == "select" || kw == "with"), sql);
  }
  CHECK(sql_scalar(db, "SELECT COUNT(*) FROM t") == "3");
  CHECK(sql_scalar(db, "SELECT group_concat(a) FROM t") == "1,2,3");
}

TEST_CASE("sql: SQLQuery extraction") {
  CHECK(extract_sql_query("SQLQuery: SELECT 1\nSQLResult: x") == "SELECT 1");
  CHECK(extract_sql_query("Question: q\nSQLQuery: \"SELECT a FROM \"t\"\"\n") == "SELECT a FROM \"t\"");
  CHECK(extract_sql_query("SQLQuery: SELECT 1 SQLResult: 1 Answer: one") == "SELECT 1");
  CHECK(extract_sql_query("SQLQuery:\n```sql\nSELECT a\nFROM t;\n```\nSQLResult:") == "SELECT a\nFROM t");
  CHECK_THROWS_AS(extract_sql_query("SELECT 1"), Error);
  CHECK_THROWS_AS(extract_sql_query("SQLQuery:   \nSQLResult: 1"), Error);
}

TEST_CASE("sql: row cap keeps total_rows") {
  TempDir dir;
  const auto db = dir.path / "s.db";
  std::string sql = "CREATE TABLE n(v INTEGER);";
  for (int i = 0; i < 120; ++i) sql += "INSERT INTO n VALUES (" + std::to_string(i) + ");";
  sql_exec(db, sql);
  SqlEngine engine(db);
  const auto q = engine.query("SELECT v FROM n", 50);
  CHECK(q.rows.size() == 50);
  CHECK(q.total_rows == 120);
  CHECK(std::to_string(q.total_rows) == sql_scalar(db, "SELECT COUNT(*) FROM n"));
}

namespace {

// Brute-force reference profiler.
Profile reference_profile(const datamodel::Table& t) {
  Profile p{t.rows.size(), t.columns.size(), {}};
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    ColumnProfile cp;
    cp.name = t.columns[c];
    std::vector<json> vals;
    for (const auto& r : t.rows)
      if (r[c].is_null()) ++cp.nulls;
      else vals.push_back(r[c]);
    std::set<std::string> kinds, distinct;
    for (const auto& v : vals) {
      kinds.insert(v.is_boolean() ? "boolean" : v.is_number_integer() ? "integer" : v.is_number() ? "number" : "string");
      distinct.insert(v.dump());
    }
    cp.distinct = distinct.size();
    if (kinds.empty()) cp.type = "null";
    else if (kinds.size() == 1) cp.type = *kinds.begin();
    else if (kinds == std::set<std::string>{"integer", "number"}) cp.type = "number";
    else cp.type = "mixed";
    if (cp.type == "integer" || cp.type == "number") {
      std::vector<double> nums;
      for (const auto& v : vals) nums.push_back(v.get<double>());
      std::sort(nums.begin(), nums.end());
      cp.min = nums.front();
      cp.max = nums.back();
    }
    p.column_profiles.push_back(cp);
  }
  return p;
}

}  // namespace

TEST_CASE("profile_data: examples") {
  datamodel::Table empty{{"a", "b"}, {}};
  const auto p0 = profile_table(empty);
  CHECK(p0.rows == 0);
  CHECK(p0.columns == 2);
  for (const auto& c : p0.column_profiles) CHECK(c.nulls == 0);

  datamodel::Table t{{"n", "s"}, {{1, "x"}, {2, "y"}, {2, "y"}, {nullptr, "z"}}};
  const auto p = profile_table(t);
  CHECK(p.column_profiles[0].nulls == 1);
  CHECK(p.column_profiles[0].distinct == 2);
  CHECK(p.column_profiles[0].min == 1.0);
  CHECK(p.column_profiles[0].max == 2.0);
  CHECK(p.column_profiles[0].type == "integer");
  CHECK(p.column_profiles[1].type == "string");
  CHECK(!p.column_profiles[1].min);
  CHECK(!p.column_profiles[1].max);

  const auto report = profile_data(datamodel::Artifact::table(t, "people"));
  CHECK(report.kind() == datamodel::ArtifactKind::Table);
  CHECK(*report.name() == "profile of people: 4 rows, 2 columns");
  CHECK(report.as<datamodel::Table>().rows[0][3] == 2);
  CHECK_THROWS_AS(profile_data(datamodel::Artifact::text("no")), Error);

  ProfileOptions capped;
  capped.exact_distinct_rows = 10;
  capped.distinct_cap = 5;
  datamodel::Table many{{"v"}, {}};
  for (int i = 0; i < 20; ++i) many.rows.push_back({i});
  const auto pc = profile_table(many, capped);
  CHECK(pc.column_profiles[0].distinct_capped);
  CHECK(pc.column_profiles[0].distinct == 5);
  CHECK(pc.column_profiles[0].max == 19.0);
}

TEST_CASE("profile_data agrees with a brute-force profiler on random tables") {
  std::mt19937 rng(5);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t cols = 1 + rng() % 5, rows = rng() % 1001;
    datamodel::Table t;
    for (std::size_t c = 0; c < cols; ++c) t.columns.push_back("c" + std::to_string(c));
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<datamodel::Cell> row;
      for (std::size_t c = 0; c < cols; ++c) {
        const auto mode = (c + iter) % 5;
        const auto roll = rng() % 10;
        if (roll == 0) row.emplace_back(nullptr);
        else if (mode == 0) row.emplace_back(static_cast<int>(rng() % 50) - 25);
        else if (mode == 1) row.emplace_back((rng() % 1000) / 8.0);
        else if (mode == 2) row.emplace_back("s" + std::to_string(rng() % 30));
        else if (mode == 3) row.emplace_back(roll % 2 == 0);
        else row.push_back(roll < 5 ? datamodel::Cell(static_cast<int>(roll)) : datamodel::Cell("t"));
      }
      t.rows.push_back(std::move(row));
    }
    CHECK(profile_table(t) == reference_profile(t));
  }
}

TEST_CASE("build_chart: valid, retried and invalid specs") {
  const auto table = datamodel::Artifact::table({{"k", "v"}, {{"a", 1}, {"b", 2}}});
  const json good = {{"chart_type", "bar"},
                     {"title", "v by k"},
                     {"x", {{"name", "k"}, {"values", {"a", "b"}}}},
                     {"series", {{{"name", "v"}, {"values", {1, 2}}}}}};
  json bad = good;
  bad["series"][0]["values"] = {1};

  Llm one;
  one.add(kChartChannel, 0, "```json\n" + good.dump() + "\n```");
  const auto a = build_chart("bar chart", table, one.client);
  CHECK(a.kind() == datamodel::ArtifactKind::ChartSpec);
  CHECK(a.as<datamodel::ChartBody>().spec == good);
  CHECK(one.provider.turns_played(kChartChannel) == 1);

  Llm two;
  two.add(kChartChannel, 0, bad.dump());
  two.add(kChartChannel, 1, good.dump());
  CHECK(build_chart("bar chart", table, two.client).as<datamodel::ChartBody>().spec == good);
  CHECK(two.provider.turns_played(kChartChannel) == 2);
  CHECK(two.provider.requests()[1].prompt_text().find("series[0] has 1 values but x has 2") != std::string::npos);

  Llm never;
  never.add(kChartChannel, -1, "no chart today");
  try {
    build_chart("bar chart", table, never.client);
    FAIL("expected SpecInvalid");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::SpecInvalid);
  }
  CHECK(never.provider.turns_played(kChartChannel) == 2);

  CHECK(chart_spec_problem(json{{"chart_type", "donut"}}).value().find("donut") != std::string::npos);
  json no_title = good;
  no_title.erase("title");
  CHECK(chart_spec_problem(no_title));
}

TEST_CASE("dataset_search: fixture playback and an unavailable live client") {
  auto fixture = FixtureDatasetClient::from_file(std::string(AGENTRT_FIXTURES) + "/datasets.json");
  const auto cards = dataset_search("titanic", fixture);
  REQUIRE(cards.size() == 3);
  CHECK(cards[0].kind() == datamodel::ArtifactKind::FileRef);
  CHECK(*cards[0].name() == "Titanic - Machine Learning from Disaster");
  CHECK(cards[0].as<datamodel::BlobRef>().size == 93081);
  CHECK(dataset_search("nothing here", fixture).empty());
  CHECK(dataset_search("unknown", fixture).empty());

  httplib::Server srv;
  std::string auth;
  srv.Get("/api/v1/datasets/list", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    if (req.get_param_value("search") == "slow") std::this_thread::sleep_for(1500ms);
    res.set_content(R"([{"title": "Iris", "ref": "uciml/iris", "totalBytes": 3858}])", "application/json");
  });
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread th([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  HttpDatasetClient live("http://127.0.0.1:" + std::to_string(port) + "/api/v1", "u", "k", 500ms);
  const auto got = live.search("iris");
  REQUIRE(got.size() == 1);
  CHECK(got[0] == DatasetCard{"Iris", "https://www.kaggle.com/datasets/uciml/iris", 3858});
  CHECK(auth == "Basic " + text::base64_encode("u:k"));
  try {
    live.search("slow");
    FAIL("expected ClientUnavailable");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::ClientUnavailable);
  }
  srv.stop();
  th.join();
  HttpDatasetClient dead("http://127.0.0.1:1", "", "", 500ms);
  CHECK_THROWS_AS(dead.search("x"), Error);
}
