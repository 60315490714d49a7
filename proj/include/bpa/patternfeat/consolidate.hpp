#pragma once

// Consolidation of per-stain values into one pattern-level number.
// Empty inputs give nullopt wherever the statistic would be 0/0.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace bpa::patternfeat {

inline std::optional<double> mean(std::span<const double> xs) {
  if (xs.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Population standard deviation (divides by n).
inline std::optional<double> sd(std::span<const double> xs) {
  const auto m = mean(xs);
  if (!m) return std::nullopt;
  double ss = 0.0;
  for (double x : xs) ss += (x - *m) * (x - *m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

template <typename T, typename Pred>
std::size_t count_if(std::span<const T> xs, Pred&& in_condition) {
  std::size_t c = 0;
  for (const auto& x : xs) {
    if (in_condition(x)) ++c;
  }
  return c;
}

template <typename T, typename Pred>
std::optional<double> ratio(std::span<const T> xs, Pred&& in_condition) {
  if (xs.empty()) return std::nullopt;
  return static_cast<double>(count_if(xs, in_condition)) / static_cast<double>(xs.size());
}

/// Zero-based positions of the elements satisfying the condition.
template <typename T, typename Pred>
std::vector<std::size_t> index_of(std::span<const T> xs, Pred&& in_condition) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (in_condition(xs[i])) out.push_back(i);
  }
  return out;
}

}  // namespace bpa::patternfeat
