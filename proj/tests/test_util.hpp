#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bpa/harness/synth.hpp"
#include "bpa/imgproc/raster.hpp"
#include "bpa/learn/matrix.hpp"
#include "bpa/regions/ellipse.hpp"

namespace bpa::testing {

/// Small seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Rows of '#' (1) and '.' (0).
inline imgproc::BinaryImage binary_from(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h == 0 ? 0 : static_cast<int>(rows.front().size());
  imgproc::BinaryImage b(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) b.at(x, y) = rows[y][x] == '#' ? 1 : 0;
  }
  return b;
}

inline std::vector<regions::Pixel> ellipse_pixels(double cx, double cy, double major, double minor,
                                                  double orientation_deg, int w, int h) {
  std::vector<regions::Pixel> px;
  harness::for_each_ellipse_pixel(cx, cy, major / 2.0, minor / 2.0, orientation_deg, w, h,
                                  [&](int x, int y) { px.push_back({x, y}); });
  return px;
}

/// Difference of two angles in degrees modulo 180, in [0, 90].
inline double axis_angle_diff(double a, double b) {
  double d = std::fmod(std::abs(a - b), 180.0);
  return d > 90.0 ? 180.0 - d : d;
}

/// Matrix with named columns f0..f{cols-1}; bt distances cycle 20/50/100/150.
inline learn::FeatureMatrix matrix(std::size_t cols) {
  learn::FeatureMatrix m;
  for (std::size_t c = 0; c < cols; ++c) m.columns.push_back("f" + std::to_string(c));
  return m;
}

inline void add_row(learn::FeatureMatrix& m, int label, std::vector<double> values) {
  static const double kBt[] = {20.0, 50.0, 100.0, 150.0};
  const std::size_t r = m.rows();
  m.append_row("r" + std::to_string(r), label, kBt[r % 4], values);
}

/// `n` rows; column 0 separates the classes (label = x0 > 0.5), the other
/// columns are uniform noise.
inline learn::FeatureMatrix separable(std::size_t n, std::size_t cols, std::uint64_t seed) {
  Gen g(seed);
  auto m = matrix(cols);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    std::vector<double> v(cols);
    v[0] = label == 1 ? g.uniform(0.6, 1.0) : g.uniform(0.0, 0.4);
    for (std::size_t c = 1; c < cols; ++c) v[c] = g.uniform(0.0, 1.0);
    add_row(m, label, v);
  }
  return m;
}

}  // namespace bpa::testing
