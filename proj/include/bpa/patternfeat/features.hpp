#pragma once

// The named per-pattern feature vector and its construction from filtered
// per-stain features.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpa/patternfeat/binning.hpp"
#include "bpa/patternfeat/consolidate.hpp"
#include "bpa/patternfeat/directional.hpp"
#include "bpa/stainfeat/stainfeat.hpp"

namespace bpa::patternfeat {

inline constexpr std::size_t kFeatureCount = 48;

/// Column order of every feature vector, CSV and model in a run.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "num_stains",
    "mean_maj_length",
    "mean_min_length",
    "mean_area",
    "mean_ratio_dis",
    "sd_ratio_dis",
    "sd_epsilon",
    "sd_impact_angle",
    "mean_solidity",
    "sd_solidity",
    "num_large_1",
    "num_large_75",
    "ratio_large_1",
    "ratio_large_75",
    "fract1_ring_5_15",
    "fract1_ring_15_25",
    "fract1_ring_25_35",
    "fract75_ring_5_15",
    "fract75_ring_15_25",
    "fract75_ring_25_35",
    "adp_fract1_ring_15_25",
    "adp_fract1_ring_25_31",
    "adp_fract75_ring_15_25",
    "adp_fract75_ring_25_31",
    "num1_rec_5_15",
    "num1_rec_15_25",
    "num1_rec_25_35",
    "num75_rec_5_15",
    "num75_rec_15_25",
    "num75_rec_25_35",
    "fract1_rec_5_15",
    "fract1_rec_15_25",
    "fract1_rec_25_35",
    "fract75_rec_5_15",
    "fract75_rec_15_25",
    "fract75_rec_25_35",
    "i",
    "adp_i",
    "rec_i",
    "m",
    "adp_m",
    "rec_m",
    "rec_bin_ratio",
    "rec_adp_bin_ratio",
    "spheri_ratio",
    "spheri_det",
    "mean_shade",
    "mean_evenness",
};

constexpr std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  return std::nullopt;
}

inline std::size_t feature_id(std::string_view name) {
  const auto i = feature_index(name);
  if (!i) throw InvalidInput("unknown feature: " + std::string(name));
  return *i;
}

enum class FeatureKind { kScalar, kCount, kRatio, kBinIndex };

/// Value domain of a feature; counts are non-negative integers, ratios lie in
/// [0,1], bin indices in 1..40.
constexpr FeatureKind feature_kind(std::string_view name) {
  if (name == "i" || name == "adp_i" || name == "rec_i") return FeatureKind::kBinIndex;
  if (name == "num_stains" || name == "m" || name == "adp_m" || name == "rec_m" ||
      name.starts_with("num")) {
    return FeatureKind::kCount;
  }
  if (name.starts_with("ratio_large") || name.starts_with("fract") || name.starts_with("adp_fract")) {
    return FeatureKind::kRatio;
  }
  return FeatureKind::kScalar;
}

using FeatureValue = std::optional<double>;

struct PatternMeta {
  std::string pattern_id;
  /// 1 = gunshot backspatter, 0 = impact spatter.
  int label = 0;
  double bt_distance_cm = 0.0;
  double px_per_mm = 0.0;
  int image_width = 0;
  int image_height = 0;
};

struct PatternFeatures {
  PatternMeta meta;
  std::array<FeatureValue, kFeatureCount> values{};

  FeatureValue& operator[](std::string_view name) { return values[feature_id(name)]; }
  const FeatureValue& operator[](std::string_view name) const { return values[feature_id(name)]; }
};

/// Area thresholds pi*(0.1 mm)^2 and pi*(0.075 mm)^2 converted to pixels.
struct LargeStainThresholds {
  double large_1 = 0.0;
  double large_75 = 0.0;

  static LargeStainThresholds for_resolution(double px_per_mm) {
    const double r1 = 0.1 * px_per_mm;
    const double r75 = 0.075 * px_per_mm;
    return {std::numbers::pi * r1 * r1, std::numbers::pi * r75 * r75};
  }
};

/// Bin range [first, last) in the 1-based bin numbering.
struct BinRange {
  int first = 0;
  int last = 0;
  [[nodiscard]] bool contains(const std::optional<int>& bin) const {
    return bin && *bin >= first && *bin < last;
  }
};

namespace detail {

inline FeatureValue from_count(std::size_t c) { return static_cast<double>(c); }

struct BinCounts {
  std::size_t total = 0;
  std::size_t large = 0;
};

inline BinCounts count_in_range(const std::vector<std::optional<int>>& bins,
                                const std::vector<bool>& large, BinRange range) {
  BinCounts c;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (!range.contains(bins[i])) continue;
    ++c.total;
    if (large[i]) ++c.large;
  }
  return c;
}

inline FeatureValue fraction(const BinCounts& c) {
  if (c.total == 0) return std::nullopt;
  return static_cast<double>(c.large) / static_cast<double>(c.total);
}

struct ModeBin {
  FeatureValue index;
  FeatureValue population;
};

/// Most populated bin (lowest index on ties) and its population.
inline ModeBin mode_bin(const std::vector<std::optional<int>>& bins, int bin_count) {
  std::vector<std::size_t> pop(static_cast<std::size_t>(bin_count) + 1, 0);
  for (const auto& b : bins) {
    if (b) ++pop[static_cast<std::size_t>(*b)];
  }
  std::size_t best = 0;
  int best_bin = 0;
  for (int j = 1; j <= bin_count; ++j) {
    if (pop[static_cast<std::size_t>(j)] > best) {
      best = pop[static_cast<std::size_t>(j)];
      best_bin = j;
    }
  }
  ModeBin m;
  m.population = static_cast<double>(best);
  if (best_bin > 0) m.index = static_cast<double>(best_bin);
  return m;
}

inline FeatureValue divide(const FeatureValue& a, const FeatureValue& b) {
  if (!a || !b || *b == 0.0) return std::nullopt;
  return *a / *b;
}

}  // namespace detail

/// Minimum stain count for a pattern to produce a feature vector.
inline constexpr std::size_t kMinStains = 2;

inline PatternFeatures build_feature_vector(const stainfeat::PatternStains& pattern,
                                            const PatternMeta& meta) {
  const auto& stains = pattern.stains;
  if (stains.size() < kMinStains) {
    throw InvalidInput("build_feature_vector: pattern '" + meta.pattern_id + "' has " +
                       std::to_string(stains.size()) + " stains, need at least 2");
  }
  if (!(meta.px_per_mm > 0.0)) throw InvalidInput("build_feature_vector: resolution must be positive");

  const std::size_t n = stains.size();
  std::vector<double> maj, minr, area, eps, angle, solidity, shade, evenness, ratio_dis;
  std::vector<regions::Point2> centroids;
  std::vector<Eigen::Vector3d> incident;
  for (const auto& s : stains) {
    const auto& r = s.region;
    maj.push_back(r.ellipse.major_axis_length);
    minr.push_back(r.ellipse.minor_axis_length);
    area.push_back(static_cast<double>(r.pixel_area));
    eps.push_back(s.epsilon);
    angle.push_back(s.impact_angle);
    solidity.push_back(r.solidity);
    shade.push_back(r.shade);
    evenness.push_back(r.evenness);
    if (s.ratio_distance) ratio_dis.push_back(*s.ratio_distance);
    centroids.push_back(r.ellipse.centroid);
    incident.push_back(incident_vector(s.impact_angle, deg_to_rad(r.ellipse.orientation)));
  }

  const auto thr = LargeStainThresholds::for_resolution(meta.px_per_mm);
  std::vector<bool> large1(n);
  std::vector<bool> large75(n);
  for (std::size_t i = 0; i < n; ++i) {
    large1[i] = area[i] > thr.large_1;
    large75[i] = area[i] > thr.large_75;
  }

  PatternFeatures f;
  f.meta = meta;
  f["num_stains"] = static_cast<double>(n);
  f["mean_maj_length"] = mean(maj);
  f["mean_min_length"] = mean(minr);
  f["mean_area"] = mean(area);
  f["mean_ratio_dis"] = mean(ratio_dis);
  f["sd_ratio_dis"] = sd(ratio_dis);
  f["sd_epsilon"] = sd(eps);
  f["sd_impact_angle"] = sd(angle);
  f["mean_solidity"] = mean(solidity);
  f["sd_solidity"] = sd(solidity);

  const auto n1 = static_cast<std::size_t>(std::count(large1.begin(), large1.end(), true));
  const auto n75 = static_cast<std::size_t>(std::count(large75.begin(), large75.end(), true));
  f["num_large_1"] = detail::from_count(n1);
  f["num_large_75"] = detail::from_count(n75);
  f["ratio_large_1"] = static_cast<double>(n1) / static_cast<double>(n);
  f["ratio_large_75"] = static_cast<double>(n75) / static_cast<double>(n);

  const auto fixed_rings = BinningScheme::fixed_annuli(pattern.centroid, meta.px_per_mm);
  const auto ring_bins = assign_bins(centroids, fixed_rings);
  const regions::Point2 image_center{(meta.image_width - 1) / 2.0, (meta.image_height - 1) / 2.0};
  const auto fixed_rect = BinningScheme::fixed_rectangular(image_center, meta.px_per_mm);
  const auto rect_bins = assign_bins(centroids, fixed_rect);

  for (int j : {5, 15, 25}) {
    const BinRange range{j, j + 10};
    const std::string suffix = std::to_string(j) + "_" + std::to_string(j + 10);
    const auto ring1 = detail::count_in_range(ring_bins, large1, range);
    const auto ring75 = detail::count_in_range(ring_bins, large75, range);
    f["fract1_ring_" + suffix] = detail::fraction(ring1);
    f["fract75_ring_" + suffix] = detail::fraction(ring75);
    const auto rec1 = detail::count_in_range(rect_bins, large1, range);
    const auto rec75 = detail::count_in_range(rect_bins, large75, range);
    f["num1_rec_" + suffix] = detail::from_count(rec1.large);
    f["num75_rec_" + suffix] = detail::from_count(rec75.large);
    f["fract1_rec_" + suffix] = detail::fraction(rec1);
    f["fract75_rec_" + suffix] = detail::fraction(rec75);
  }

  const auto ring_mode = detail::mode_bin(ring_bins, kBinCount);
  const auto rect_mode = detail::mode_bin(rect_bins, kBinCount);
  f["i"] = ring_mode.index;
  f["m"] = ring_mode.population;
  f["rec_i"] = rect_mode.index;
  f["rec_m"] = rect_mode.population;

  // The adaptive width is undefined when every stain sits on the centroid.
  if (pattern.median_distance > 0.0) {
    const auto adaptive = BinningScheme::adaptive_annuli(pattern.centroid, pattern.median_distance);
    const auto adp_bins = assign_bins(centroids, adaptive);
    for (const BinRange range : {BinRange{15, 25}, BinRange{25, 31}}) {
      const std::string suffix = std::to_string(range.first) + "_" + std::to_string(range.last);
      f["adp_fract1_ring_" + suffix] = detail::fraction(detail::count_in_range(adp_bins, large1, range));
      f["adp_fract75_ring_" + suffix] = detail::fraction(detail::count_in_range(adp_bins, large75, range));
    }
    const auto adp_mode = detail::mode_bin(adp_bins, kBinCount);
    f["adp_i"] = adp_mode.index;
    f["adp_m"] = adp_mode.population;
  }

  f["rec_bin_ratio"] = detail::divide(f["i"], f["rec_i"]);
  f["rec_adp_bin_ratio"] = detail::divide(f["adp_i"], f["rec_i"]);

  if (const auto scatter = scatter_summary(incident)) {
    f["spheri_ratio"] = scatter->spheri_ratio;
    f["spheri_det"] = scatter->spheri_det;
  }
  f["mean_shade"] = mean(shade);
  f["mean_evenness"] = mean(evenness);
  return f;
}

}  // namespace bpa::patternfeat
