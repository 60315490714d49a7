#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "bpa/regions/ellipse.hpp"

namespace bpa::regions {

namespace detail {

inline std::int64_t cross(const Pixel& o, const Pixel& a, const Pixel& b) {
  return static_cast<std::int64_t>(a.x - o.x) * (b.y - o.y) -
         static_cast<std::int64_t>(a.y - o.y) * (b.x - o.x);
}

}  // namespace detail

/// Convex hull of pixel centers (Andrew's monotone chain), counter-clockwise
/// in (x, y) order with collinear points dropped. Degenerate inputs yield one
/// or two vertices.
inline std::vector<Pixel> convex_hull(std::span<const Pixel> pixels) {
  std::vector<Pixel> pts(pixels.begin(), pixels.end());
  std::sort(pts.begin(), pts.end(), [](const Pixel& a, const Pixel& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Pixel> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && detail::cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Number of integer lattice points (pixel centers) inside or on the closed
/// convex polygon. Each row's span is the min/max of its intersections with
/// the polygon edges, so the count does not depend on vertex order.
inline std::int64_t rasterized_area(std::span<const Pixel> hull) {
  if (hull.empty()) return 0;
  int ymin = hull.front().y;
  int ymax = ymin;
  for (const auto& p : hull) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const std::size_t n = hull.size();
  std::int64_t total = 0;
  for (int y = ymin; y <= ymax; ++y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      const Pixel& a = hull[i];
      const Pixel& b = hull[(i + 1) % n];
      if (a.y == b.y) {
        if (a.y == y) {
          lo = std::min({lo, double(a.x), double(b.x)});
          hi = std::max({hi, double(a.x), double(b.x)});
        }
        continue;
      }
      if (y < std::min(a.y, b.y) || y > std::max(a.y, b.y)) continue;
      const double x = a.x + static_cast<double>(y - a.y) * (b.x - a.x) / (b.y - a.y);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (lo > hi) continue;
    constexpr double eps = 1e-9;
    const auto first = static_cast<std::int64_t>(std::ceil(lo - eps));
    const auto last = static_cast<std::int64_t>(std::floor(hi + eps));
    if (last >= first) total += last - first + 1;
  }
  return total;
}

inline std::int64_t convex_area(std::span<const Pixel> pixels) {
  const auto hull = convex_hull(pixels);
  return rasterized_area(hull);
}

}  // namespace bpa::regions
