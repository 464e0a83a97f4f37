#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "agentrt/datamodel/artifact.hpp"

namespace agentrt::exec {

struct ColumnProfile {
  std::string name;
  // "integer", "number", "boolean", "string", "mixed", or "null" when the
  // column holds no values.
  std::string type;
  std::size_t nulls = 0;
  std::size_t distinct = 0;
  // Distinct counting stops at the cap on tables above the row threshold;
  // `distinct` is then a lower bound.
  bool distinct_capped = false;
  std::optional<double> min, max;  // numeric columns only

  bool operator==(const ColumnProfile&) const = default;
};

struct Profile {
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::vector<ColumnProfile> column_profiles;

  bool operator==(const Profile&) const = default;
};

struct ProfileOptions {
  std::size_t exact_distinct_rows = 100000;
  std::size_t distinct_cap = 10000;
};

Profile profile_table(const datamodel::Table& table, const ProfileOptions& opts = {});
nlohmann::json to_json(const Profile& p);

// Throws InvalidArgument unless the artifact is a Table. The report is a
// Table artifact, one row per column, named with the totals.
datamodel::Artifact profile_data(const datamodel::Artifact& table, const ProfileOptions& opts = {});

}  // namespace agentrt::exec
