#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace agentrt::datamodel {

// A cell is a JSON scalar: null, boolean, integer, float or string.
using Cell = nlohmann::json;

// Named columns plus rows of equal width.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return columns.size(); }

  // Throws InvalidArgument when a row's width differs from the column count.
  void validate() const;

  bool operator==(const Table&) const = default;
};

// Display text of a cell: strings verbatim, numbers in shortest JSON form,
// null as the empty string.
std::string cell_text(const Cell& cell);

// Infers a scalar from a CSV field: empty -> null, integer, float, true/false,
// otherwise the string itself.
Cell infer_cell(std::string_view field);

// RFC 4180 CSV with a header row. Quoted fields may contain separators,
// doubled quotes and line breaks. Throws UnreadableContent on ragged rows
// or an unterminated quote.
Table parse_csv(std::string_view csv);
std::string to_csv(const Table& table);

// One JSON object per line; columns are the union of keys in first-seen order.
Table parse_json_lines(std::string_view text);

}  // namespace agentrt::datamodel
