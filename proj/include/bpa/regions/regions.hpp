#pragma once

// Per-region morphology (area, filled area, convex area, solidity), moment
// ellipse, tone (shade, evenness) and the stain filter.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "bpa/imgproc/imgproc.hpp"
#include "bpa/regions/convex_hull.hpp"
#include "bpa/regions/ellipse.hpp"

namespace bpa::regions {

struct StainRegion {
  int label = 0;
  std::int64_t pixel_area = 0;
  std::int64_t filled_area = 0;
  std::int64_t convex_area = 0;
  EllipseParams ellipse;
  double solidity = 0.0;
  /// 90 - orientation, degrees.
  double vertical_angle = 0.0;
  /// Mean inverted-gray intensity over the region.
  double shade = 0.0;
  /// Population standard deviation of the same intensities.
  double evenness = 0.0;
};

/// Pixel lists per label, indexed 0..region_count-1 for labels 1..region_count.
inline std::vector<std::vector<Pixel>> region_pixels(const imgproc::LabelMap& labels) {
  std::vector<std::vector<Pixel>> out(static_cast<std::size_t>(labels.region_count));
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      const auto l = labels.at(x, y);
      if (l > 0) out[static_cast<std::size_t>(l - 1)].push_back({x, y});
    }
  }
  return out;
}

/// Pixel count of the region after its own enclosed holes are filled.
/// Holes are judged on the region's mask alone, so other regions lying inside
/// a hole count as filled.
inline std::int64_t filled_area(std::span<const Pixel> pixels) {
  if (pixels.empty()) return 0;
  int x0 = pixels.front().x, x1 = x0, y0 = pixels.front().y, y1 = y0;
  for (const auto& p : pixels) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  // One pixel of padding keeps the border ring connected to the outside.
  imgproc::BinaryImage mask(x1 - x0 + 3, y1 - y0 + 3);
  for (const auto& p : pixels) mask.at(p.x - x0 + 1, p.y - y0 + 1) = 1;
  return static_cast<std::int64_t>(imgproc::count_foreground(imgproc::fill_holes(mask)));
}

inline StainRegion describe_region(int label, std::span<const Pixel> pixels,
                                   const imgproc::GrayImage& inverted_gray) {
  StainRegion r;
  r.label = label;
  r.pixel_area = static_cast<std::int64_t>(pixels.size());
  r.ellipse = fit_ellipse(pixels);
  r.filled_area = filled_area(pixels);
  r.convex_area = convex_area(pixels);
  r.solidity = static_cast<double>(r.pixel_area) / static_cast<double>(r.convex_area);
  r.vertical_angle = 90.0 - r.ellipse.orientation;

  double sum = 0.0;
  for (const auto& p : pixels) sum += inverted_gray.at(p.x, p.y);
  const double n = static_cast<double>(pixels.size());
  r.shade = sum / n;
  double ss = 0.0;
  for (const auto& p : pixels) {
    const double d = inverted_gray.at(p.x, p.y) - r.shade;
    ss += d * d;
  }
  r.evenness = std::sqrt(ss / n);
  return r;
}

/// One StainRegion per nonzero label, in label order.
inline std::vector<StainRegion> region_props(const imgproc::LabelMap& labels,
                                             const imgproc::GrayImage& inverted_gray) {
  if (!labels.same_shape(inverted_gray)) {
    throw InvalidInput("region_props: label map and gray image dimensions differ");
  }
  const auto groups = region_pixels(labels);
  std::vector<StainRegion> out;
  out.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out.push_back(describe_region(static_cast<int>(i + 1), groups[i], inverted_gray));
  }
  return out;
}

/// Removal thresholds. A stain matching any enabled criterion is dropped.
struct StainFilter {
  /// Removes stains with eccentricity <= 0.3 (near-circular).
  bool remove_near_circular = true;
  double max_removed_eccentricity = 0.3;
  double min_impact_angle = std::numbers::pi / 18.0;
  double min_solidity = 0.75;
  /// Upper bound for (circle with minor-axis diameter) / filled_area.
  double max_minor_circle_ratio = 1.0;
  double min_area_to_filled = 0.95;
};

enum class RemovalReason {
  kNone = 0,
  kNearCircular,
  kShallowImpact,
  kLowSolidity,
  kMinorCircleTooLarge,
  kHoleOrOverlap,
};

inline const char* to_string(RemovalReason r) {
  switch (r) {
    case RemovalReason::kNone: return "kept";
    case RemovalReason::kNearCircular: return "eccentricity";
    case RemovalReason::kShallowImpact: return "impact_angle";
    case RemovalReason::kLowSolidity: return "solidity";
    case RemovalReason::kMinorCircleTooLarge: return "minor_circle_ratio";
    case RemovalReason::kHoleOrOverlap: return "area_to_filled";
  }
  return "unknown";
}

/// First matching removal criterion, or kNone when the stain is retained.
inline RemovalReason removal_reason(const StainRegion& s, const StainFilter& f = {}) {
  const auto& e = s.ellipse;
  if (f.remove_near_circular && e.eccentricity <= f.max_removed_eccentricity) {
    return RemovalReason::kNearCircular;
  }
  if (impact_angle(e) < f.min_impact_angle) return RemovalReason::kShallowImpact;
  if (s.solidity < f.min_solidity) return RemovalReason::kLowSolidity;
  const double filled = static_cast<double>(s.filled_area);
  const double half_minor = e.minor_axis_length / 2.0;
  if (std::numbers::pi * half_minor * half_minor / filled > f.max_minor_circle_ratio) {
    return RemovalReason::kMinorCircleTooLarge;
  }
  if (static_cast<double>(s.pixel_area) / filled < f.min_area_to_filled) {
    return RemovalReason::kHoleOrOverlap;
  }
  return RemovalReason::kNone;
}

inline std::vector<StainRegion> filter_stains(const std::vector<StainRegion>& stains,
                                              const StainFilter& f = {}) {
  std::vector<StainRegion> kept;
  for (const auto& s : stains) {
    if (removal_reason(s, f) == RemovalReason::kNone) kept.push_back(s);
  }
  return kept;
}

}  // namespace bpa::regions
