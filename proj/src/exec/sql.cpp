#include "agentrt/exec/sql.hpp"

#include <sqlite3.h>

#include <cctype>

#include "agentrt/agent/template.hpp"
#include "agentrt/core/text.hpp"
#include "agentrt/datamodel/linearize.hpp"

namespace agentrt::exec {

namespace {

// Index of the first character that is not whitespace, a comment or (when
// `semicolons`) a statement separator.
std::size_t skip_ignorable(std::string_view s, std::size_t i, bool semicolons) {
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c)) || (semicolons && c == ';')) {
      ++i;
    } else if (s.compare(i, 2, "--") == 0) {
      const auto nl = s.find('\n', i);
      i = nl == std::string_view::npos ? s.size() : nl + 1;
    } else if (s.compare(i, 2, "/*") == 0) {
      const auto end = s.find("*/", i + 2);
      i = end == std::string_view::npos ? s.size() : end + 2;
    } else {
      break;
    }
  }
  return i;
}

datamodel::Cell column_cell(sqlite3_stmt* st, int col) {
  switch (sqlite3_column_type(st, col)) {
    case SQLITE_INTEGER: return static_cast<std::int64_t>(sqlite3_column_int64(st, col));
    case SQLITE_FLOAT: return sqlite3_column_double(st, col);
    case SQLITE_TEXT:
      return std::string(reinterpret_cast<const char*>(sqlite3_column_text(st, col)),
                         static_cast<std::size_t>(sqlite3_column_bytes(st, col)));
    case SQLITE_BLOB: return "<blob " + std::to_string(sqlite3_column_bytes(st, col)) + " bytes>";
    default: return nullptr;
  }
}

struct Stmt {
  sqlite3_stmt* st = nullptr;
  ~Stmt() { sqlite3_finalize(st); }
};

std::string quote_ident(const std::string& name) {
  std::string out = "\"";
  for (char c : name) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string strip_wrapping(std::string s) {
  s = std::string(text::trim(s));
  if (s.rfind("```", 0) == 0) {
    const auto nl = s.find_first_of(" \n", 3);
    s = nl == std::string::npos ? "" : s.substr(nl + 1);
    if (const auto end = s.rfind("```"); end != std::string::npos) s.resize(end);
    s = std::string(text::trim(s));
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = std::string(text::trim(s.substr(1, s.size() - 2)));
  while (!s.empty() && s.back() == ';') s.pop_back();
  return std::string(text::trim(s));
}

}  // namespace

std::string first_keyword(std::string_view sql) {
  auto i = skip_ignorable(sql, 0, false);
  std::string kw;
  while (i < sql.size() && (std::isalpha(static_cast<unsigned char>(sql[i])) || sql[i] == '_'))
    kw += static_cast<char>(std::toupper(static_cast<unsigned char>(sql[i++])));
  return kw;
}

SqlEngine::SqlEngine(const std::filesystem::path& db) {
  if (!std::filesystem::exists(db)) throw Error(ErrorCategory::NotFound, "no database at " + db.string());
  if (sqlite3_open_v2(db.c_str(), &db_, SQLITE_OPEN_READONLY | SQLITE_OPEN_FULLMUTEX, nullptr) != SQLITE_OK) {
    const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCategory::UnreadableContent, "cannot open database: " + msg);
  }
  char* err = nullptr;
  const int rc = sqlite3_exec(db_, "PRAGMA query_only = 1; SELECT count(*) FROM sqlite_master;", nullptr, nullptr, &err);
  if (rc != SQLITE_OK) {
    const std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCategory::UnreadableContent, "not a database: " + msg);
  }
}

SqlEngine::~SqlEngine() { sqlite3_close(db_); }

QueryOutcome SqlEngine::query(const std::string& sql, std::size_t row_cap) const {
  const auto kw = first_keyword(sql);
  if (kw != "SELECT" && kw != "WITH")
    throw Error(ErrorCategory::NonSelectRejected, "only SELECT or WITH statements may run, got " +
                                                      (kw.empty() ? std::string("nothing") : kw));
  std::lock_guard lock(mu_);
  const auto start = std::chrono::steady_clock::now();
  Stmt stmt;
  const char* tail = nullptr;
  if (sqlite3_prepare_v2(db_, sql.c_str(), static_cast<int>(sql.size()), &stmt.st, &tail) != SQLITE_OK)
    throw Error(ErrorCategory::SqlSyntaxError, sqlite3_errmsg(db_));
  if (!stmt.st) throw Error(ErrorCategory::SqlSyntaxError, "empty statement");
  const std::string_view rest(tail, sql.c_str() + sql.size() - tail);
  if (skip_ignorable(rest, 0, true) != rest.size())
    throw Error(ErrorCategory::NonSelectRejected, "only a single statement may run");
  if (!sqlite3_stmt_readonly(stmt.st)) throw Error(ErrorCategory::NonSelectRejected, "statement would write");

  QueryOutcome out;
  const int ncol = sqlite3_column_count(stmt.st);
  for (int c = 0; c < ncol; ++c) out.columns.emplace_back(sqlite3_column_name(stmt.st, c));
  int rc;
  while ((rc = sqlite3_step(stmt.st)) == SQLITE_ROW) {
    if (out.rows.size() < row_cap) {
      std::vector<datamodel::Cell> row;
      for (int c = 0; c < ncol; ++c) row.push_back(column_cell(stmt.st, c));
      out.rows.push_back(std::move(row));
    }
    ++out.total_rows;
  }
  if (rc != SQLITE_DONE) throw Error(ErrorCategory::SqlSyntaxError, sqlite3_errmsg(db_));
  out.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return out;
}

std::vector<std::string> SqlEngine::tables() const {
  std::vector<std::string> names;
  for (const auto& row :
       query("SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' ORDER BY name", 100000)
           .rows)
    names.push_back(row[0].get<std::string>());
  return names;
}

std::string SqlEngine::table_info(std::size_t sample_rows) const {
  std::string out;
  for (const auto& t : tables()) {
    Stmt stmt;
    std::string create;
    {
      std::lock_guard lock(mu_);
      sqlite3_prepare_v2(db_, "SELECT sql FROM sqlite_master WHERE type = 'table' AND name = ?", -1, &stmt.st, nullptr);
      sqlite3_bind_text(stmt.st, 1, t.c_str(), -1, SQLITE_TRANSIENT);
      if (sqlite3_step(stmt.st) == SQLITE_ROW && sqlite3_column_text(stmt.st, 0))
        create = reinterpret_cast<const char*>(sqlite3_column_text(stmt.st, 0));
    }
    const auto sample = query("SELECT * FROM " + quote_ident(t) + " LIMIT " + std::to_string(sample_rows), sample_rows);
    if (!out.empty()) out += "\n\n";
    out += create + "\n\n/*\n" + std::to_string(sample.rows.size()) + " rows from " + t + " table:\n";
    for (std::size_t c = 0; c < sample.columns.size(); ++c) out += (c ? "\t" : "") + sample.columns[c];
    for (const auto& row : sample.rows) {
      out += "\n";
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "\t" : "") + datamodel::cell_text(row[c]);
    }
    out += "\n*/";
  }
  return out;
}

std::string extract_sql_query(const std::string& reply) {
  static const std::string kField = "SQLQuery:";
  const auto at = reply.find(kField);
  if (at == std::string::npos) throw Error(ErrorCategory::LlmFormatError, "reply has no SQLQuery field");
  std::string rest = reply.substr(at + kField.size());
  std::size_t end = rest.size();
  // A fenced query may span lines; otherwise the field ends at the line.
  const auto lead = skip_ignorable(rest, 0, false);
  if (rest.compare(lead, 3, "```") == 0) {
    const auto close = rest.find("```", lead + 3);
    end = close == std::string::npos ? rest.size() : close + 3;
  } else if (const auto nl = rest.find('\n', lead); nl != std::string::npos) {
    end = nl;
  }
  for (const char* label : {"SQLResult:", "Answer:", "Question:"})
    end = std::min(end, rest.find(label));
  auto sql = strip_wrapping(rest.substr(0, end));
  if (sql.empty()) throw Error(ErrorCategory::LlmFormatError, "SQLQuery field is empty");
  return sql;
}

SqlAnswer sql_answer(const std::string& question, const std::string& table_info, const std::string& dialect,
                     const llm::LlmClient& llm, const SqlEngine& engine, const std::string& chat_history,
                     const CancelToken& cancel, const agent::PromptCatalog& catalog) {
  const auto prompt = agent::render(catalog.get("sql_prompt"), {{"chat_history", chat_history},
                                                                 {"dialect", dialect},
                                                                 {"table_info", table_info},
                                                                 {"question", question}});
  const auto first = llm.complete({{"user", prompt}}, kSqlChannel, cancel);
  if (first.finish == llm::FinishReason::Cancelled) throw Error(ErrorCategory::Interrupted, "cancelled");

  SqlAnswer out;
  out.sql = extract_sql_query(first.text);
  out.outcome = engine.query(out.sql);
  auto result = datamodel::linearize(datamodel::Artifact::table(out.outcome.table()), 2000);
  if (out.outcome.total_rows > out.outcome.rows.size())
    result += datamodel::table_elision_marker(out.outcome.total_rows);

  const auto continued = prompt + "\nSQLQuery: " + out.sql + "\nSQLResult: " + result + "\nAnswer:";
  const auto second = llm.complete({{"user", continued}}, kSqlChannel, cancel);
  if (second.finish == llm::FinishReason::Cancelled) throw Error(ErrorCategory::Interrupted, "cancelled");
  std::string answer(text::trim(second.text));
  if (answer.rfind("Answer:", 0) == 0) answer = std::string(text::trim(answer.substr(7)));
  if (answer.size() >= 2 && answer.front() == '"' && answer.back() == '"') answer = answer.substr(1, answer.size() - 2);
  out.answer = answer;
  return out;
}

}  // namespace agentrt::exec
