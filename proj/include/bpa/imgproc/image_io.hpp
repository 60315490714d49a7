#pragma once

// Raster decode/encode backed by OpenCV's image codecs. Link against the
// bpa_io target to use this header.

#include <filesystem>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "bpa/imgproc/raster.hpp"

namespace bpa::imgproc {

class ImageReadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decodes JPEG, PNG or TIFF into an 8-bit 1- or 3-channel (RGB) raster.
/// Alpha channels are dropped; 16-bit samples are scaled to 8 bits.
inline ColorImage read_image(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  if (mat.empty()) throw ImageReadError("cannot decode image: " + path.string());
  if (mat.depth() == CV_16U) {
    mat.convertTo(mat, CV_8U, 1.0 / 257.0);
  } else if (mat.depth() != CV_8U) {
    throw ImageReadError("unsupported sample depth in " + path.string());
  }

  ColorImage out;
  out.width = mat.cols;
  out.height = mat.rows;
  const int src_channels = mat.channels();
  if (src_channels == 1) {
    out.channels = 1;
  } else if (src_channels == 3 || src_channels == 4) {
    out.channels = 3;
  } else {
    throw ImageReadError("unsupported channel count " + std::to_string(src_channels) + " in " +
                         path.string());
  }
  out.data.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
  std::size_t k = 0;
  for (int y = 0; y < mat.rows; ++y) {
    const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * src_channels;
      if (out.channels == 1) {
        out.data[k++] = px[0];
      } else {
        // OpenCV stores BGR(A).
        out.data[k++] = px[2];
        out.data[k++] = px[1];
        out.data[k++] = px[0];
      }
    }
  }
  return out;
}

/// Writes an 8-bit raster; the format follows the file extension.
inline void write_image(const std::filesystem::path& path, const ColorImage& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw InvalidInput("write_image: unsupported channel count " + std::to_string(image.channels));
  }
  cv::Mat mat(image.height, image.width, image.channels == 1 ? CV_8UC1 : CV_8UC3);
  std::size_t k = 0;
  for (int y = 0; y < image.height; ++y) {
    std::uint8_t* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width; ++x) {
      std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * image.channels;
      if (image.channels == 1) {
        px[0] = image.data[k++];
      } else {
        px[2] = image.data[k++];
        px[1] = image.data[k++];
        px[0] = image.data[k++];
      }
    }
  }
  if (!cv::imwrite(path.string(), mat)) throw std::runtime_error("cannot write image: " + path.string());
}

}  // namespace bpa::imgproc
