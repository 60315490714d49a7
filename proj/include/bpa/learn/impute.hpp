#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bpa/learn/matrix.hpp"

namespace bpa::learn {

enum class Imputation { kNone, kZero, kKnn };

inline const char* to_string(Imputation i) {
  switch (i) {
    case Imputation::kNone: return "none";
    case Imputation::kZero: return "zero";
    case Imputation::kKnn: return "knn";
  }
  return "none";
}

inline Imputation parse_imputation(const std::string& s) {
  if (s == "none") return Imputation::kNone;
  if (s == "zero") return Imputation::kZero;
  if (s == "knn") return Imputation::kKnn;
  throw InvalidInput("impute must be 'knn', 'zero' or 'none', got '" + s + "'");
}

inline FeatureMatrix zero_impute(FeatureMatrix m) {
  for (auto& v : m.cells) {
    if (is_missing(v)) v = 0.0;
  }
  return m;
}

/// Euclidean distance over the columns observed in both rows, scaled by
/// sqrt(total columns / shared columns). nullopt when nothing is shared.
inline std::optional<double> nan_euclidean(std::span<const double> a, std::span<const double> b) {
  double ss = 0.0;
  std::size_t shared = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (is_missing(a[c]) || is_missing(b[c])) continue;
    const double d = a[c] - b[c];
    ss += d * d;
    ++shared;
  }
  if (shared == 0) return std::nullopt;
  return std::sqrt(ss * static_cast<double>(a.size()) / static_cast<double>(shared));
}

/// Replaces each missing cell with the mean of that column over the k nearest
/// rows that observe it. Distances are taken on the input matrix, so the
/// result does not depend on the order cells are filled. Equal distances are
/// broken by row order. Fewer than k donors uses all of them.
inline FeatureMatrix knn_impute(const FeatureMatrix& m, std::size_t k = 10) {
  if (k == 0) throw InvalidInput("knn_impute: k must be positive");
  for (std::size_t c = 0; c < m.cols(); ++c) {
    bool any = false;
    for (std::size_t r = 0; r < m.rows() && !any; ++r) any = !is_missing(m.at(r, c));
    if (!any && m.rows() > 0) {
      throw InvalidInput("knn_impute: column '" + m.columns[c] + "' is missing in every row");
    }
  }

  FeatureMatrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    if (std::none_of(row.begin(), row.end(), [](double v) { return is_missing(v); })) continue;

    std::vector<std::pair<double, std::size_t>> neighbours;
    for (std::size_t o = 0; o < m.rows(); ++o) {
      if (o == r) continue;
      if (const auto d = nan_euclidean(row, m.row(o))) neighbours.emplace_back(*d, o);
    }
    std::sort(neighbours.begin(), neighbours.end());

    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!is_missing(row[c])) continue;
      double sum = 0.0;
      std::size_t used = 0;
      for (const auto& [dist, o] : neighbours) {
        if (used == k) break;
        const double v = m.at(o, c);
        if (is_missing(v)) continue;
        sum += v;
        ++used;
      }
      if (used == 0) {
        throw InvalidInput("knn_impute: no neighbour of row '" + m.row_ids[r] + "' observes column '" +
                           m.columns[c] + "'");
      }
      out.at(r, c) = sum / static_cast<double>(used);
    }
  }
  return out;
}

inline FeatureMatrix impute(const FeatureMatrix& m, Imputation how, std::size_t k = 10) {
  switch (how) {
    case Imputation::kZero: return zero_impute(m);
    case Imputation::kKnn: return knn_impute(m, k);
    case Imputation::kNone: break;
  }
  return m;
}

}  // namespace bpa::learn
