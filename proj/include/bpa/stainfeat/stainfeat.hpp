#pragma once

// Derived per-stain quantities: impact angle, tail-adjusted axis ratio and
// distance to the pattern centroid.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "bpa/regions/regions.hpp"

namespace bpa::stainfeat {

using regions::impact_angle;
using regions::Point2;

/// minor / (major * filled_area / ellipse_area). Equals minor/major when the
/// filled area matches the fitted ellipse area; long tails inflate the filled
/// area and shrink the ratio.
inline double adjusted_impact_angle(const regions::EllipseParams& e, double filled_area) {
  if (!(filled_area > 0.0)) throw InvalidInput("adjusted_impact_angle: filled_area must be positive");
  const double adjusted_major = e.major_axis_length * (filled_area / regions::ellipse_area(e));
  return e.minor_axis_length / adjusted_major;
}

struct StainFeatures {
  regions::StainRegion region;
  double impact_angle = 0.0;
  double epsilon = 0.0;
  double distance = 0.0;
  /// distance / median distance of the pattern; nullopt when that median is 0.
  std::optional<double> ratio_distance;
};

/// Median with the midpoint convention for even counts. Reorders `values`.
inline double median_in_place(std::span<double> values) {
  if (values.empty()) throw InvalidInput("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

inline double median(std::vector<double> values) { return median_in_place(values); }

/// Componentwise median of stain centroids.
inline Point2 pattern_centroid(std::span<const Point2> centroids) {
  if (centroids.empty()) throw InvalidInput("pattern_centroid: no stains");
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(centroids.size());
  ys.reserve(centroids.size());
  for (const auto& c : centroids) {
    xs.push_back(c.x);
    ys.push_back(c.y);
  }
  return {median_in_place(xs), median_in_place(ys)};
}

inline Point2 pattern_centroid(std::span<const StainFeatures> stains) {
  std::vector<Point2> cs;
  cs.reserve(stains.size());
  for (const auto& s : stains) cs.push_back(s.region.ellipse.centroid);
  return pattern_centroid(cs);
}

struct Distances {
  std::vector<double> distance;
  std::vector<std::optional<double>> ratio_distance;
  double median_distance = 0.0;
};

inline Distances stain_distances(std::span<const Point2> centroids, Point2 center) {
  Distances d;
  d.distance.reserve(centroids.size());
  for (const auto& c : centroids) d.distance.push_back(std::hypot(c.x - center.x, c.y - center.y));
  d.median_distance = d.distance.empty() ? 0.0 : median(d.distance);
  d.ratio_distance.reserve(centroids.size());
  for (double v : d.distance) {
    if (d.median_distance > 0.0) {
      d.ratio_distance.emplace_back(v / d.median_distance);
    } else {
      d.ratio_distance.emplace_back(std::nullopt);
    }
  }
  return d;
}

/// Per-stain features for a filtered stain list, plus the pattern centroid
/// and median stain distance used by the pattern-level binning.
struct PatternStains {
  std::vector<StainFeatures> stains;
  Point2 centroid;
  double median_distance = 0.0;
};

inline PatternStains compute_stain_features(std::span<const regions::StainRegion> regions_in) {
  PatternStains out;
  if (regions_in.empty()) return out;
  std::vector<Point2> cs;
  cs.reserve(regions_in.size());
  for (const auto& r : regions_in) cs.push_back(r.ellipse.centroid);
  out.centroid = pattern_centroid(cs);
  const auto d = stain_distances(cs, out.centroid);
  out.median_distance = d.median_distance;
  out.stains.reserve(regions_in.size());
  for (std::size_t i = 0; i < regions_in.size(); ++i) {
    StainFeatures s;
    s.region = regions_in[i];
    s.impact_angle = impact_angle(s.region.ellipse);
    s.epsilon = adjusted_impact_angle(s.region.ellipse, static_cast<double>(s.region.filled_area));
    s.distance = d.distance[i];
    s.ratio_distance = d.ratio_distance[i];
    out.stains.push_back(std::move(s));
  }
  return out;
}

}  // namespace bpa::stainfeat
