#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bpa {

/// Thrown for inputs that violate an operation's preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace imgproc {

/// Row-major raster. The tag keeps grayscale, binary and label rasters
/// from being mixed up even when they share a pixel type.
template <typename T, typename Tag>
struct Raster {
  using value_type = T;

  int width = 0;
  int height = 0;
  std::vector<T> pixels;

  Raster() = default;
  Raster(int w, int h, T fill = T{})
      : width(w), height(h), pixels(checked_size(w, h), fill) {}
  Raster(int w, int h, std::vector<T> data) : width(w), height(h), pixels(std::move(data)) {
    if (pixels.size() != checked_size(w, h)) {
      throw InvalidInput("raster: pixel count " + std::to_string(pixels.size()) +
                         " does not match " + std::to_string(w) + "x" + std::to_string(h));
    }
  }

  [[nodiscard]] std::size_t size() const { return pixels.size(); }
  [[nodiscard]] bool empty() const { return pixels.empty(); }
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  [[nodiscard]] bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  T& at(int x, int y) { return pixels[index(x, y)]; }
  const T& at(int x, int y) const { return pixels[index(x, y)]; }

  template <typename U, typename OtherTag>
  [[nodiscard]] bool same_shape(const Raster<U, OtherTag>& other) const {
    return width == other.width && height == other.height;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static std::size_t checked_size(int w, int h) {
    if (w < 0 || h < 0) throw InvalidInput("raster: negative dimensions");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
};

struct GrayTag {};
struct BinaryTag {};
struct LabelTag {};

/// Intensities in [0,255].
using GrayImage = Raster<std::uint8_t, GrayTag>;
/// Values in {0,1}.
using BinaryImage = Raster<std::uint8_t, BinaryTag>;

/// Connected-component labels; 0 is background, regions are 1..region_count.
struct LabelMap : Raster<std::int32_t, LabelTag> {
  int region_count = 0;
};

/// Decoded interleaved raster with 1 or 3 (RGB) channels.
struct ColorImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

}  // namespace imgproc
}  // namespace bpa
