#pragma once

// Grayscale conversion, inversion, thresholding, 8-connected labeling and
// hole filling. Every function is pure; rasters are passed by const reference
// and results are returned by value.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpa/diagnostics.hpp"
#include "bpa/imgproc/raster.hpp"

namespace bpa::imgproc {

/// Luma weights applied to RGB input.
inline constexpr double kLumaR = 0.2989;
inline constexpr double kLumaG = 0.5870;
inline constexpr double kLumaB = 0.1140;

inline GrayImage to_gray(const ColorImage& image) {
  const std::size_t n = static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
  if (image.channels == 1) {
    return GrayImage(image.width, image.height,
                     std::vector<std::uint8_t>(image.data.begin(), image.data.end()));
  }
  if (image.channels != 3) {
    throw InvalidInput("to_gray: unsupported channel count " + std::to_string(image.channels));
  }
  if (image.data.size() != 3 * n) throw InvalidInput("to_gray: data size does not match dimensions");
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = kLumaR * image.data[3 * i] + kLumaG * image.data[3 * i + 1] +
                     kLumaB * image.data[3 * i + 2];
    out[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
  }
  return GrayImage(image.width, image.height, std::move(out));
}

inline GrayImage invert(const GrayImage& g) {
  GrayImage out = g;
  for (auto& p : out.pixels) p = static_cast<std::uint8_t>(255 - p);
  return out;
}

/// Either a fixed threshold in [0,255] or automatic (Otsu) selection.
class ThresholdSpec {
 public:
  ThresholdSpec() = default;
  static ThresholdSpec automatic() { return {}; }
  static ThresholdSpec fixed(int t) {
    if (t < 0 || t > 255) throw InvalidInput("threshold must lie in [0,255], got " + std::to_string(t));
    ThresholdSpec s;
    s.value_ = t;
    return s;
  }
  /// Parses "auto" or an integer 0..255.
  static ThresholdSpec parse(const std::string& text) {
    if (text == "auto") return automatic();
    std::size_t used = 0;
    int t = 0;
    try {
      t = std::stoi(text, &used);
    } catch (const std::exception&) {
      throw InvalidInput("threshold must be 'auto' or an integer 0-255, got '" + text + "'");
    }
    if (used != text.size()) throw InvalidInput("threshold must be 'auto' or an integer 0-255, got '" + text + "'");
    return fixed(t);
  }

  [[nodiscard]] bool is_auto() const { return !value_.has_value(); }
  [[nodiscard]] int value() const { return *value_; }

 private:
  std::optional<int> value_;
};

inline std::array<std::uint64_t, 256> histogram(const GrayImage& g) {
  std::array<std::uint64_t, 256> h{};
  for (auto p : g.pixels) ++h[p];
  return h;
}

/// Otsu's threshold: the t maximizing between-class variance when class 0 is
/// {x <= t}. The smallest maximizing t is returned. Returns nullopt when the
/// image has fewer than two distinct intensities.
inline std::optional<int> otsu_threshold(const GrayImage& g) {
  const auto h = histogram(g);
  const double total = static_cast<double>(g.size());
  int distinct = 0;
  double sum_all = 0.0;
  for (int v = 0; v < 256; ++v) {
    if (h[v] > 0) ++distinct;
    sum_all += static_cast<double>(v) * static_cast<double>(h[v]);
  }
  if (distinct < 2) return std::nullopt;

  double w0 = 0.0;
  double sum0 = 0.0;
  double best = -1.0;
  int best_t = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += static_cast<double>(h[t]);
    sum0 += static_cast<double>(t) * static_cast<double>(h[t]);
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

/// Chosen threshold and output of a binarization.
struct Binarization {
  BinaryImage bits;
  int threshold = 0;
};

/// A pixel becomes 1 iff its intensity is strictly greater than the threshold.
inline Binarization binarize_with_threshold(const GrayImage& g, const ThresholdSpec& spec,
                                            Diagnostics* diag = nullptr) {
  int t = 0;
  if (spec.is_auto()) {
    if (auto otsu = otsu_threshold(g)) {
      t = *otsu;
    } else {
      t = g.empty() ? 0 : g.pixels.front();
      warn(diag, "binarize: uniform image (all pixels " + std::to_string(t) +
                     "), automatic threshold degenerates to that value");
    }
  } else {
    t = spec.value();
  }
  BinaryImage out(g.width, g.height);
  for (std::size_t i = 0; i < g.size(); ++i) out.pixels[i] = g.pixels[i] > t ? 1 : 0;
  return {std::move(out), t};
}

inline BinaryImage binarize(const GrayImage& g, const ThresholdSpec& spec, Diagnostics* diag = nullptr) {
  return binarize_with_threshold(g, spec, diag).bits;
}

namespace detail {

inline std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

inline void unite(std::vector<std::int32_t>& parent, std::int32_t a, std::int32_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (a < b) {
    parent[b] = a;
  } else {
    parent[a] = b;
  }
}

}  // namespace detail

/// Two-pass 8-connected labeling. Final labels are numbered in raster-scan
/// order of each component's first pixel.
inline LabelMap label_components(const BinaryImage& b) {
  LabelMap out;
  out.width = b.width;
  out.height = b.height;
  out.pixels.assign(b.size(), 0);

  std::vector<std::int32_t> parent{0};
  const int w = b.width;
  for (int y = 0; y < b.height; ++y) {
    for (int x = 0; x < w; ++x) {
      if (b.at(x, y) == 0) continue;
      // Already-visited neighbours: W, NW, N, NE.
      std::int32_t current = 0;
      const auto visit = [&](int nx, int ny) {
        if (!b.contains(nx, ny)) return;
        const std::int32_t l = out.at(nx, ny);
        if (l == 0) return;
        if (current == 0) {
          current = l;
        } else if (l != current) {
          detail::unite(parent, current, l);
        }
      };
      visit(x - 1, y);
      visit(x - 1, y - 1);
      visit(x, y - 1);
      visit(x + 1, y - 1);
      if (current == 0) {
        current = static_cast<std::int32_t>(parent.size());
        parent.push_back(current);
      }
      out.at(x, y) = current;
    }
  }

  std::vector<std::int32_t> final_label(parent.size(), 0);
  int next = 0;
  for (auto& l : out.pixels) {
    if (l == 0) continue;
    const std::int32_t root = detail::find_root(parent, l);
    if (final_label[root] == 0) final_label[root] = ++next;
    l = final_label[root];
  }
  out.region_count = next;
  return out;
}

/// Sets every background pixel that is not 4-connected to the border through
/// background.
inline BinaryImage fill_holes(const BinaryImage& b) {
  const int w = b.width;
  const int h = b.height;
  std::vector<std::uint8_t> outside(b.size(), 0);
  std::vector<std::size_t> stack;
  const auto seed = [&](int x, int y) {
    const std::size_t i = b.index(x, y);
    if (b.pixels[i] == 0 && outside[i] == 0) {
      outside[i] = 1;
      stack.push_back(i);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    if (x > 0) seed(x - 1, y);
    if (x + 1 < w) seed(x + 1, y);
    if (y > 0) seed(x, y - 1);
    if (y + 1 < h) seed(x, y + 1);
  }
  BinaryImage out = b;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.pixels[i] == 0 && outside[i] == 0) out.pixels[i] = 1;
  }
  return out;
}

inline std::size_t count_foreground(const BinaryImage& b) {
  return static_cast<std::size_t>(std::count(b.pixels.begin(), b.pixels.end(), std::uint8_t{1}));
}

}  // namespace bpa::imgproc
