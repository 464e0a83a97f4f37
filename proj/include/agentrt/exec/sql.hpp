#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "agentrt/agent/prompt_catalog.hpp"
#include "agentrt/core/cancel.hpp"
#include "agentrt/datamodel/table.hpp"
#include "agentrt/llm/client.hpp"

struct sqlite3;

namespace agentrt::exec {

inline constexpr const char* kSqlChannel = "executor.sql";

struct QueryOutcome {
  std::vector<std::string> columns;
  std::vector<std::vector<datamodel::Cell>> rows;  // at most the row cap
  std::size_t total_rows = 0;
  std::chrono::milliseconds elapsed{0};

  datamodel::Table table() const { return {columns, rows}; }
};

// First keyword of a statement after whitespace and -- / block comments,
// upper-cased. Empty if there is none.
std::string first_keyword(std::string_view sql);

// Read-only handle on one SQLite database file.
class SqlEngine {
 public:
  // Opens read-only with query_only set. Throws NotFound if the file is
  // missing, UnreadableContent if it is not a database.
  explicit SqlEngine(const std::filesystem::path& db);
  ~SqlEngine();
  SqlEngine(const SqlEngine&) = delete;
  SqlEngine& operator=(const SqlEngine&) = delete;

  // Runs exactly one SELECT/WITH statement. Throws NonSelectRejected for any
  // other statement, for trailing statements and for statements the engine
  // reports as writing; SqlSyntaxError with the engine message otherwise.
  QueryOutcome query(const std::string& sql, std::size_t row_cap = 50) const;

  std::vector<std::string> tables() const;
  // CREATE statements followed by up to `sample_rows` rows of each table.
  std::string table_info(std::size_t sample_rows = 3) const;

 private:
  mutable std::mutex mu_;
  sqlite3* db_ = nullptr;
};

// The SQL from the first "SQLQuery:" field, up to end of line or the next
// labeled field. Surrounding quotes and code fences are removed. Throws
// LlmFormatError when there is no such field or it is empty.
std::string extract_sql_query(const std::string& reply);

struct SqlAnswer {
  std::string sql;
  QueryOutcome outcome;
  std::string answer;
};

// Fills the SQL prompt, executes the extracted query and asks the model to
// continue after "SQLResult: <outcome>" with the answer.
SqlAnswer sql_answer(const std::string& question, const std::string& table_info, const std::string& dialect,
                     const llm::LlmClient& llm, const SqlEngine& engine, const std::string& chat_history = "",
                     const CancelToken& cancel = CancelToken::none(),
                     const agent::PromptCatalog& catalog = agent::PromptCatalog::builtin());

}  // namespace agentrt::exec
