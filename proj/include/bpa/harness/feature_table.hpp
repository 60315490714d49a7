#pragma once

// Feature matrix CSV: `pattern_id,label,bt_distance_cm` followed by the 48
// registry feature names. Labels are 1 (gunshot) / 0 (impact); missing values
// are empty cells.

#include <string>
#include <vector>

#include "bpa/harness/csv.hpp"
#include "bpa/harness/manifest.hpp"
#include "bpa/learn/matrix.hpp"

namespace bpa::harness {

inline CsvRow feature_csv_header() {
  CsvRow h{"pattern_id", "label", "bt_distance_cm"};
  for (auto name : patternfeat::kFeatureNames) h.emplace_back(name);
  return h;
}

inline std::string feature_csv(const learn::FeatureMatrix& m) {
  std::vector<CsvRow> rows;
  rows.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    CsvRow row{m.row_ids[r], std::to_string(m.labels[r]), format_number(m.bt_distance_cm[r])};
    for (double v : m.row(r)) row.push_back(learn::is_missing(v) ? std::string{} : format_number(v));
    rows.push_back(std::move(row));
  }
  return to_csv_text(feature_csv_header(), rows);
}

inline std::string feature_csv(const std::vector<patternfeat::PatternFeatures>& patterns) {
  return feature_csv(learn::FeatureMatrix::from_patterns(patterns));
}

inline learn::FeatureMatrix parse_feature_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw InvalidInput("features csv: empty file");
  if (rows.front() != feature_csv_header()) {
    throw InvalidInput("features csv: header does not match the feature registry");
  }
  auto m = learn::FeatureMatrix::with_registry_columns();
  std::vector<double> values(m.cols());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3 + m.cols()) {
      throw InvalidInput("features csv: line " + std::to_string(i + 1) + " has " + std::to_string(r.size()) +
                         " fields");
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto& cell = r[3 + c];
      values[c] = cell.empty() ? learn::kMissing : parse_number(cell, m.columns[c]);
    }
    m.append_row(r[0], static_cast<int>(parse_class(r[1])), parse_number(r[2], "bt_distance_cm"), values);
  }
  return m;
}

inline learn::FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  return parse_feature_csv(read_text(path));
}

}  // namespace bpa::harness
