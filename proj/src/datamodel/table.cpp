#include "agentrt/datamodel/table.hpp"

#include <charconv>
#include <cmath>
#include <unordered_map>

#include "agentrt/core/error.hpp"
#include "agentrt/core/text.hpp"

namespace agentrt::datamodel {

void Table::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != columns.size())
      throw Error(ErrorCategory::InvalidArgument,
                  "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                      " cells, expected " + std::to_string(columns.size()));
  }
}

std::string cell_text(const Cell& cell) {
  if (cell.is_null()) return {};
  if (cell.is_string()) return cell.get<std::string>();
  return cell.dump();
}

Cell infer_cell(std::string_view field) {
  if (field.empty()) return nullptr;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc{} && p == last) return i;
  double d = 0;
  if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc{} && p == last && std::isfinite(d))
    return d;
  if (field == "true") return true;
  if (field == "false") return false;
  return std::string(field);
}

Table parse_csv(std::string_view csv) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw Error(ErrorCategory::UnreadableContent, "stray quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCategory::UnreadableContent, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  Table table;
  if (records.empty()) return table;
  table.columns = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
    if (rec.size() != table.columns.size())
      throw Error(ErrorCategory::UnreadableContent,
                  "CSV record " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                      " fields, header has " + std::to_string(table.columns.size()));
    std::vector<Cell> row;
    row.reserve(rec.size());
    for (const auto& f : rec) row.push_back(infer_cell(f));
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}
}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

Table parse_json_lines(std::string_view text) {
  std::vector<nlohmann::json> objects;
  Table table;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& line : text::split_lines(text)) {
    if (text::trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCategory::UnreadableContent, std::string("JSON-lines: ") + e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCategory::UnreadableContent, "JSON-lines record is not an object");
    for (const auto& [k, v] : obj.items()) {
      if (!index.count(k)) {
        index.emplace(k, table.columns.size());
        table.columns.push_back(k);
      }
    }
    objects.push_back(std::move(obj));
  }
  for (const auto& obj : objects) {
    std::vector<Cell> row(table.columns.size(), nullptr);
    for (const auto& [k, v] : obj.items()) {
      row[index.at(k)] = v.is_structured() ? Cell(v.dump()) : v;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace agentrt::datamodel
