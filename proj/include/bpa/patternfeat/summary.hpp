#pragma once

// Per-class boxplot statistics for one feature.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "bpa/patternfeat/features.hpp"

namespace bpa::patternfeat {

/// Linear-interpolation quantile of sorted data (position q*(n-1)).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InvalidInput("quantile of an empty set");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct BoxSummary {
  std::size_t count = 0;
  std::size_t missing = 0;
  /// False when every value was missing; the statistics below are then unset.
  bool has_data = false;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  /// Most extreme values inside the 1.5*IQR fences.
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

inline BoxSummary box_summary(const std::vector<FeatureValue>& values) {
  BoxSummary b;
  std::vector<double> xs;
  for (const auto& v : values) {
    if (v && !std::isnan(*v)) {
      xs.push_back(*v);
    } else {
      ++b.missing;
    }
  }
  b.count = xs.size();
  if (xs.empty()) return b;
  std::sort(xs.begin(), xs.end());
  b.has_data = true;
  b.min = xs.front();
  b.max = xs.back();
  b.q1 = quantile_sorted(xs, 0.25);
  b.median = quantile_sorted(xs, 0.5);
  b.q3 = quantile_sorted(xs, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.max;
  b.whisker_high = b.min;
  for (double x : xs) {
    if (x < lo_fence || x > hi_fence) {
      b.outliers.push_back(x);
    } else {
      b.whisker_low = std::min(b.whisker_low, x);
      b.whisker_high = std::max(b.whisker_high, x);
    }
  }
  return b;
}

/// Box summary of one feature for each class label present.
inline std::map<int, BoxSummary> class_summary(const std::vector<PatternFeatures>& patterns,
                                               std::string_view feature) {
  const std::size_t col = feature_id(feature);
  std::map<int, std::vector<FeatureValue>> by_class;
  for (const auto& p : patterns) by_class[p.meta.label].push_back(p.values[col]);
  std::map<int, BoxSummary> out;
  for (const auto& [label, vals] : by_class) out[label] = box_summary(vals);
  return out;
}

}  // namespace bpa::patternfeat
