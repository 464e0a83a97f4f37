#include "agentrt/datamodel/linearize.hpp"

#include "agentrt/core/text.hpp"

namespace agentrt::datamodel {
namespace {

std::string join_row(const std::vector<Cell>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += kTableDelimiter;
    out += cell_text(row[i]);
  }
  return out;
}

std::string linearize_table(const Table& table, std::size_t budget) {
  std::string header;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) header += kTableDelimiter;
    header += table.columns[i];
  }
  std::vector<std::string> lines;
  lines.reserve(table.rows.size());
  std::size_t full = header.size();
  for (const auto& row : table.rows) {
    lines.push_back(join_row(row));
    full += 1 + lines.back().size();
  }
  if (full <= budget) {
    std::string out = header;
    for (const auto& l : lines) out += '\n' + l;
    return out;
  }
  const auto marker = table_elision_marker(table.rows.size());
  if (header.size() + marker.size() > budget) {
    std::string flat = header;
    for (const auto& l : lines) {
      flat += '\n' + l;
      if (flat.size() > budget) break;
    }
    return truncate_text(flat, budget);
  }
  std::string out = header;
  for (const auto& l : lines) {
    if (out.size() + 1 + l.size() + marker.size() > budget) break;
    out += '\n' + l;
  }
  out += marker;
  return out;
}

std::string placeholder(const Artifact& a) {
  std::string out = "[" + std::string(to_string(a.kind())) + ": ";
  out += a.name().value_or(a.as<BlobRef>().uri);
  if (a.mime()) out += " (" + *a.mime() + ")";
  out += "]";
  return out;
}

}  // namespace

std::string table_elision_marker(std::size_t total_rows) {
  return "\n… (" + std::to_string(total_rows) + " rows total)";
}

std::string text_elision_marker(std::size_t total_chars) {
  return "\n… (" + std::to_string(total_chars) + " chars total)";
}

std::string truncate_text(std::string_view s, std::size_t budget) {
  if (s.size() <= budget) return std::string(s);
  const auto marker = text_elision_marker(s.size());
  if (marker.size() >= budget) return std::string(text::utf8_prefix(s, budget));
  return std::string(text::utf8_prefix(s, budget - marker.size())) + marker;
}

std::string linearize(const Artifact& artifact, std::size_t char_budget) {
  if (char_budget == 0) throw Error(ErrorCategory::InvalidArgument, "char_budget must be positive");
  switch (artifact.kind()) {
    case ArtifactKind::Text:
    case ArtifactKind::ConsoleOutput:
      return truncate_text(artifact.as<TextBody>().text, char_budget);
    case ArtifactKind::Code:
      return truncate_text(artifact.as<CodeBody>().source, char_budget);
    case ArtifactKind::Table:
      return linearize_table(artifact.as<Table>(), char_budget);
    case ArtifactKind::Image:
    case ArtifactKind::FileRef:
    case ArtifactKind::DatabaseRef:
      return truncate_text(placeholder(artifact), char_budget);
    case ArtifactKind::ChartSpec:
      return truncate_text(artifact.as<ChartBody>().spec.dump(), char_budget);
    case ArtifactKind::Error: {
      const auto& e = artifact.as<ErrorBody>();
      return truncate_text("[error: " + std::string(to_string(e.category)) + "] " + e.message, char_budget);
    }
  }
  return {};
}

}  // namespace agentrt::datamodel
