#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bpa/patternfeat/features.hpp"

namespace bpa::learn {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Dense row-major design matrix. Missing cells hold NaN.
struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<std::string> row_ids;
  std::vector<double> cells;
  /// 1 = gunshot, 0 = impact.
  std::vector<int> labels;
  std::vector<double> bt_distance_cm;

  [[nodiscard]] std::size_t rows() const { return labels.size(); }
  [[nodiscard]] std::size_t cols() const { return columns.size(); }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return cells[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return cells[r * cols() + c]; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return {cells.data() + r * cols(), cols()};
  }

  [[nodiscard]] bool has_missing() const {
    for (double v : cells) {
      if (is_missing(v)) return true;
    }
    return false;
  }

  void validate() const {
    if (cells.size() != rows() * cols()) throw InvalidInput("feature matrix: cell count does not match shape");
    if (row_ids.size() != rows() || bt_distance_cm.size() != rows()) {
      throw InvalidInput("feature matrix: per-row metadata length mismatch");
    }
    for (int l : labels) {
      if (l != 0 && l != 1) throw InvalidInput("feature matrix: labels must be 0 or 1");
    }
  }

  void append_row(std::string id, int label, double bt_distance, std::span<const double> values) {
    if (values.size() != cols()) throw InvalidInput("feature matrix: row width mismatch");
    row_ids.push_back(std::move(id));
    labels.push_back(label);
    bt_distance_cm.push_back(bt_distance);
    cells.insert(cells.end(), values.begin(), values.end());
  }

  [[nodiscard]] FeatureMatrix subset(std::span<const std::size_t> which) const {
    FeatureMatrix out;
    out.columns = columns;
    out.row_ids.reserve(which.size());
    out.cells.reserve(which.size() * cols());
    for (std::size_t r : which) out.append_row(row_ids[r], labels[r], bt_distance_cm[r], row(r));
    return out;
  }

  static FeatureMatrix with_registry_columns() {
    FeatureMatrix m;
    for (auto name : patternfeat::kFeatureNames) m.columns.emplace_back(name);
    return m;
  }

  static FeatureMatrix from_patterns(const std::vector<patternfeat::PatternFeatures>& patterns) {
    FeatureMatrix m = with_registry_columns();
    std::vector<double> row(m.cols());
    for (const auto& p : patterns) {
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = p.values[c].value_or(kMissing);
      m.append_row(p.meta.pattern_id, p.meta.label, p.meta.bt_distance_cm, row);
    }
    return m;
  }
};

}  // namespace bpa::learn
