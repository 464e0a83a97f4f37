#include "agentrt/exec/profile.hpp"

#include <unordered_set>

namespace agentrt::exec {

namespace {

const char* cell_type(const datamodel::Cell& c) {
  if (c.is_boolean()) return "boolean";
  if (c.is_number_integer()) return "integer";
  if (c.is_number()) return "number";
  return "string";
}

std::string merge_type(const std::string& seen, const char* next) {
  if (seen == "null" || seen == next) return next;
  if ((seen == "integer" && std::string(next) == "number") || (seen == "number" && std::string(next) == "integer"))
    return "number";
  return "mixed";
}

}  // namespace

Profile profile_table(const datamodel::Table& table, const ProfileOptions& opts) {
  table.validate();
  Profile p;
  p.rows = table.row_count();
  p.columns = table.column_count();
  const bool exact = p.rows <= opts.exact_distinct_rows;
  for (std::size_t c = 0; c < p.columns; ++c) {
    ColumnProfile cp;
    cp.name = table.columns[c];
    cp.type = "null";
    std::unordered_set<std::string> seen;
    for (const auto& row : table.rows) {
      const auto& cell = row[c];
      if (cell.is_null()) {
        ++cp.nulls;
        continue;
      }
      cp.type = merge_type(cp.type, cell_type(cell));
      if (exact || seen.size() < opts.distinct_cap) seen.insert(cell.dump());
      else cp.distinct_capped = true;
      if (cell.is_number() && !cell.is_boolean()) {
        const double v = cell.get<double>();
        cp.min = cp.min ? std::min(*cp.min, v) : v;
        cp.max = cp.max ? std::max(*cp.max, v) : v;
      }
    }
    cp.distinct = seen.size();
    if (cp.type != "integer" && cp.type != "number") cp.min = cp.max = std::nullopt;
    p.column_profiles.push_back(std::move(cp));
  }
  return p;
}

nlohmann::json to_json(const Profile& p) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : p.column_profiles) {
    nlohmann::json j = {{"name", c.name}, {"type", c.type}, {"nulls", c.nulls}, {"distinct", c.distinct},
                        {"distinct_capped", c.distinct_capped}};
    if (c.min) j["min"] = *c.min;
    if (c.max) j["max"] = *c.max;
    cols.push_back(std::move(j));
  }
  return {{"rows", p.rows}, {"columns", p.columns}, {"column_profiles", cols}};
}

datamodel::Artifact profile_data(const datamodel::Artifact& table, const ProfileOptions& opts) {
  if (table.kind() != datamodel::ArtifactKind::Table)
    throw Error(ErrorCategory::InvalidArgument, "profiling needs a table, got " + std::string(to_string(table.kind())));
  const auto p = profile_table(table.as<datamodel::Table>(), opts);
  datamodel::Table report;
  report.columns = {"column", "type", "nulls", "distinct", "min", "max"};
  for (const auto& c : p.column_profiles) {
    const auto distinct = c.distinct_capped ? datamodel::Cell(">=" + std::to_string(c.distinct)) : datamodel::Cell(c.distinct);
    report.rows.push_back({c.name, c.type, c.nulls, distinct, c.min ? datamodel::Cell(*c.min) : datamodel::Cell(),
                           c.max ? datamodel::Cell(*c.max) : datamodel::Cell()});
  }
  const auto name = table.name() ? *table.name() : std::string("table");
  return datamodel::Artifact::table(std::move(report), "profile of " + name + ": " + std::to_string(p.rows) + " rows, " +
                                                           std::to_string(p.columns) + " columns");
}

}  // namespace agentrt::exec
