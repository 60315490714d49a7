#pragma once

// Synthetic spatter patterns: filled, non-overlapping ellipses on a white
// background, with the true geometry of every stain recorded.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "bpa/imgproc/raster.hpp"
#include "bpa/learn/seeds.hpp"

namespace bpa::harness {

struct StainDistribution {
  /// Log-normal ellipse area in pixels: median and log-space sd.
  double area_median_px = 150.0;
  double area_log_sd = 0.4;
  /// Minor/major ratio, uniform.
  double axis_ratio_min = 0.35;
  double axis_ratio_max = 0.85;
  /// Orientation in degrees, uniform in [min, max).
  double orientation_min_deg = -90.0;
  double orientation_max_deg = 90.0;
  /// Isotropic Gaussian spread of stain centers around the image center.
  double spread_px = 150.0;
  int stains_min = 30;
  int stains_max = 60;
  std::array<int, 3> rgb{110, 15, 20};
};

struct ClassSpec {
  int patterns = 30;
  StainDistribution stains;
  /// Blood-to-target distances assigned round-robin to the class's patterns.
  std::vector<double> bt_distances_cm{30.0, 60.0, 120.0, 150.0};
};

struct SynthSpec {
  int width = 800;
  int height = 800;
  double dpi = 100.0;
  std::uint64_t seed = 1;
  /// Minimum background gap between stains, pixels.
  int min_gap_px = 3;
  /// Placement attempts per stain before it is dropped.
  int max_attempts = 200;
  ClassSpec gunshot;
  ClassSpec impact;

  /// Defaults: gunshot patterns have smaller stains than impact patterns.
  static SynthSpec defaults() {
    SynthSpec s;
    s.gunshot.stains.area_median_px = 80.0;
    s.impact.stains.area_median_px = 240.0;
    return s;
  }

  void validate() const {
    if (width < 8 || height < 8) throw InvalidInput("synth: image too small");
    if (!(dpi > 0.0)) throw InvalidInput("synth: dpi must be positive");
    if (min_gap_px < 0 || max_attempts < 1) throw InvalidInput("synth: invalid placement limits");
    for (const auto* c : {&gunshot, &impact}) {
      const auto& d = c->stains;
      if (c->patterns < 0) throw InvalidInput("synth: negative pattern count");
      if (c->bt_distances_cm.empty()) throw InvalidInput("synth: need at least one bt distance");
      if (!(d.area_median_px > 0.0) || d.area_log_sd < 0.0) throw InvalidInput("synth: invalid area distribution");
      if (!(d.axis_ratio_min > 0.0) || d.axis_ratio_max > 1.0 || d.axis_ratio_min > d.axis_ratio_max) {
        throw InvalidInput("synth: axis ratio range must lie in (0,1]");
      }
      if (d.stains_min < 0 || d.stains_min > d.stains_max) throw InvalidInput("synth: invalid stain count range");
      if (d.orientation_min_deg > d.orientation_max_deg) throw InvalidInput("synth: invalid orientation range");
    }
  }
};

struct TrueStain {
  double cx = 0.0;
  double cy = 0.0;
  /// Full axis lengths, pixels.
  double major = 0.0;
  double minor = 0.0;
  /// Counter-clockwise from the x-axis as viewed, degrees.
  double orientation_deg = 0.0;
  std::int64_t pixel_area = 0;
};

struct SynthPattern {
  std::string id;
  int label = 0;
  double bt_distance_cm = 0.0;
  imgproc::ColorImage image;
  std::vector<TrueStain> stains;
  int dropped = 0;
};

/// Pixel centers (x, y) inside the ellipse; y is a row index (downwards) and
/// the orientation is measured with the row axis flipped.
template <typename Visit>
void for_each_ellipse_pixel(double cx, double cy, double semi_major, double semi_minor, double orientation_deg,
                            int width, int height, Visit&& visit) {
  const double th = orientation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(th);
  const double s = std::sin(th);
  const double reach = semi_major + 1.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + reach)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(cy + reach)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - cx;
      const double dy = -(y - cy);
      const double u = (dx * c + dy * s) / semi_major;
      const double v = (-dx * s + dy * c) / semi_minor;
      if (u * u + v * v <= 1.0) visit(x, y);
    }
  }
}

inline SynthPattern render_pattern(const SynthSpec& spec, const ClassSpec& cls, int label, std::string id,
                                   double bt_distance_cm, std::uint64_t seed) {
  const auto& d = cls.stains;
  std::mt19937_64 rng(seed);
  SynthPattern p;
  p.id = std::move(id);
  p.label = label;
  p.bt_distance_cm = bt_distance_cm;
  p.image.width = spec.width;
  p.image.height = spec.height;
  p.image.channels = 3;
  p.image.data.assign(static_cast<std::size_t>(spec.width) * spec.height * 3, 255);
  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(spec.width) * spec.height, 0);

  std::uniform_int_distribution<int> count_dist(d.stains_min, d.stains_max);
  std::lognormal_distribution<double> area_dist(std::log(d.area_median_px), d.area_log_sd);
  std::uniform_real_distribution<double> ratio_dist(d.axis_ratio_min, d.axis_ratio_max);
  std::uniform_real_distribution<double> orient_dist(d.orientation_min_deg, d.orientation_max_deg);
  std::normal_distribution<double> pos_dist(0.0, d.spread_px);

  const int target = count_dist(rng);
  const double gap = spec.min_gap_px;
  for (int k = 0; k < target; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_attempts && !placed; ++attempt) {
      const double area = area_dist(rng);
      const double ratio = ratio_dist(rng);
      const double orient = orient_dist(rng);
      const double cx = (spec.width - 1) / 2.0 + pos_dist(rng);
      const double cy = (spec.height - 1) / 2.0 + pos_dist(rng);
      const double a = std::sqrt(area / (std::numbers::pi * ratio));
      const double b = std::max(0.5, ratio * a);
      const double margin = a + gap + 1.0;
      if (cx < margin || cy < margin || cx > spec.width - 1 - margin || cy > spec.height - 1 - margin) continue;

      bool clash = false;
      for_each_ellipse_pixel(cx, cy, a + gap, b + gap, orient, spec.width, spec.height, [&](int x, int y) {
        if (occupied[static_cast<std::size_t>(y) * spec.width + x] != 0) clash = true;
      });
      if (clash) continue;

      TrueStain t{cx, cy, 2.0 * a, 2.0 * b, orient, 0};
      for_each_ellipse_pixel(cx, cy, a, b, orient, spec.width, spec.height, [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * spec.width + x;
        occupied[i] = 1;
        for (int ch = 0; ch < 3; ++ch) p.image.data[3 * i + ch] = static_cast<std::uint8_t>(d.rgb[ch]);
        ++t.pixel_area;
      });
      if (t.pixel_area == 0) continue;
      p.stains.push_back(t);
      placed = true;
    }
    if (!placed) ++p.dropped;
  }
  return p;
}

/// Renders every pattern of both classes. Gunshot patterns come first.
inline std::vector<SynthPattern> synth_generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<SynthPattern> out;
  std::uint64_t index = 0;
  for (const auto& [cls, label, prefix] : {std::tuple{&spec.gunshot, 1, "gunshot"}, std::tuple{&spec.impact, 0, "impact"}}) {
    for (int i = 0; i < cls->patterns; ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%03d", prefix, i);
      const double bt = cls->bt_distances_cm[static_cast<std::size_t>(i) % cls->bt_distances_cm.size()];
      out.push_back(render_pattern(spec, *cls, label, name, bt, learn::derive_seed(spec.seed, learn::streams::kSynth, index++)));
    }
  }
  return out;
}

inline void from_json(const nlohmann::json& j, StainDistribution& d) {
  d.area_median_px = j.value("area_median_px", d.area_median_px);
  d.area_log_sd = j.value("area_log_sd", d.area_log_sd);
  d.axis_ratio_min = j.value("axis_ratio_min", d.axis_ratio_min);
  d.axis_ratio_max = j.value("axis_ratio_max", d.axis_ratio_max);
  d.orientation_min_deg = j.value("orientation_min_deg", d.orientation_min_deg);
  d.orientation_max_deg = j.value("orientation_max_deg", d.orientation_max_deg);
  d.spread_px = j.value("spread_px", d.spread_px);
  d.stains_min = j.value("stains_min", d.stains_min);
  d.stains_max = j.value("stains_max", d.stains_max);
  d.rgb = j.value("rgb", d.rgb);
}

inline void from_json(const nlohmann::json& j, ClassSpec& c) {
  c.patterns = j.value("patterns", c.patterns);
  if (j.contains("stains")) from_json(j.at("stains"), c.stains);
  c.bt_distances_cm = j.value("bt_distances_cm", c.bt_distances_cm);
}

/// Overlays the keys present in `j` onto SynthSpec::defaults().
inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec s = SynthSpec::defaults();
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.dpi = j.value("dpi", s.dpi);
  s.seed = j.value("seed", s.seed);
  s.min_gap_px = j.value("min_gap_px", s.min_gap_px);
  s.max_attempts = j.value("max_attempts", s.max_attempts);
  if (j.contains("gunshot")) from_json(j.at("gunshot"), s.gunshot);
  if (j.contains("impact")) from_json(j.at("impact"), s.impact);
  s.validate();
  return s;
}

}  // namespace bpa::harness
