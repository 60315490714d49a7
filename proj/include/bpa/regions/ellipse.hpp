#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "bpa/imgproc/raster.hpp"

namespace bpa::regions {

/// Integer pixel coordinate: x is the column, y the row (growing downwards).
struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Ellipse with the same normalized second central moments as a region.
///
/// `orientation` is the angle in degrees, in [-90, 90), between the image
/// x-axis and the major axis, measured counter-clockwise as the image is
/// viewed (rows grow downwards, so the row axis is flipped before measuring).
struct EllipseParams {
  Point2 centroid;
  double major_axis_length = 0.0;
  double minor_axis_length = 0.0;
  double orientation = 0.0;
  double eccentricity = 0.0;
};

/// Second central moments of a pixel set, with y measured upwards.
/// The diagonal terms include the 1/12 variance of a unit-square pixel.
struct Moments {
  Point2 centroid;
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

inline Moments central_moments(std::span<const Pixel> pixels) {
  if (pixels.empty()) throw InvalidInput("fit_ellipse: empty pixel set");
  const double n = static_cast<double>(pixels.size());
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : pixels) {
    sx += p.x;
    sy += p.y;
  }
  Moments m;
  m.centroid = {sx / n, sy / n};
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (const auto& p : pixels) {
    const double dx = p.x - m.centroid.x;
    const double dy = -(p.y - m.centroid.y);
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  m.xx = sxx / n + 1.0 / 12.0;
  m.yy = syy / n + 1.0 / 12.0;
  m.xy = sxy / n;
  return m;
}

inline EllipseParams ellipse_from_moments(const Moments& m) {
  const double common = std::sqrt((m.xx - m.yy) * (m.xx - m.yy) + 4.0 * m.xy * m.xy);
  EllipseParams e;
  e.centroid = m.centroid;
  e.major_axis_length = 2.0 * std::numbers::sqrt2 * std::sqrt(m.xx + m.yy + common);
  e.minor_axis_length = 2.0 * std::numbers::sqrt2 * std::sqrt(m.xx + m.yy - common);
  double theta = 0.5 * std::atan2(2.0 * m.xy, m.xx - m.yy) * 180.0 / std::numbers::pi;
  if (theta >= 90.0) theta -= 180.0;
  e.orientation = theta;
  const double ratio = e.minor_axis_length / e.major_axis_length;
  e.eccentricity = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
  return e;
}

inline EllipseParams fit_ellipse(std::span<const Pixel> pixels) {
  return ellipse_from_moments(central_moments(pixels));
}

/// Pixel count of the fitted ellipse, (pi/4) * major * minor.
inline double ellipse_area(const EllipseParams& e) {
  return std::numbers::pi / 4.0 * e.major_axis_length * e.minor_axis_length;
}

/// Impact angle in radians, arcsin(minor / major).
inline double impact_angle(const EllipseParams& e) {
  return std::asin(std::min(1.0, e.minor_axis_length / e.major_axis_length));
}

}  // namespace bpa::regions
