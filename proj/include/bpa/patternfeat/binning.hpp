#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "bpa/imgproc/raster.hpp"
#include "bpa/regions/ellipse.hpp"

namespace bpa::patternfeat {

inline constexpr int kBinCount = 40;
inline constexpr double kFixedBinWidthMm = 25.0;
inline constexpr double kAdaptiveDivisor = 20.0;

inline double pixels_per_mm(double dpi) { return dpi / 25.4; }

enum class BinKind { kAnnulus, kRectangular };

/// Bins 1..bin_count grow outward from `center`, each `width` pixels wide.
/// Annuli measure the Euclidean distance to the center; rectangular bins
/// measure |y - center.y|.
struct BinningScheme {
  BinKind kind = BinKind::kAnnulus;
  double width = 0.0;
  int bin_count = kBinCount;
  regions::Point2 center;

  static BinningScheme fixed_annuli(regions::Point2 pattern_centroid, double px_per_mm) {
    return {BinKind::kAnnulus, kFixedBinWidthMm * px_per_mm, kBinCount, pattern_centroid};
  }
  static BinningScheme adaptive_annuli(regions::Point2 pattern_centroid, double median_distance) {
    return {BinKind::kAnnulus, median_distance / kAdaptiveDivisor, kBinCount, pattern_centroid};
  }
  static BinningScheme fixed_rectangular(regions::Point2 image_center, double px_per_mm) {
    return {BinKind::kRectangular, kFixedBinWidthMm * px_per_mm, kBinCount, image_center};
  }
};

/// Bin j is [(j-1)*width, j*width); positions past the last bin get nullopt.
inline std::optional<int> bin_of(double offset, const BinningScheme& scheme) {
  if (!(scheme.width > 0.0)) throw InvalidInput("binning: width must be positive");
  const double j = std::floor(offset / scheme.width) + 1.0;
  if (j < 1.0 || j > scheme.bin_count) return std::nullopt;
  return static_cast<int>(j);
}

inline double bin_offset(regions::Point2 p, const BinningScheme& scheme) {
  if (scheme.kind == BinKind::kAnnulus) return std::hypot(p.x - scheme.center.x, p.y - scheme.center.y);
  return std::abs(p.y - scheme.center.y);
}

inline std::vector<std::optional<int>> assign_bins(const std::vector<regions::Point2>& positions,
                                                   const BinningScheme& scheme) {
  std::vector<std::optional<int>> out;
  out.reserve(positions.size());
  for (const auto& p : positions) out.push_back(bin_of(bin_offset(p, scheme), scheme));
  return out;
}

}  // namespace bpa::patternfeat
