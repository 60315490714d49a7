#include <gtest/gtest.h>

#include "bpa/imgproc/imgproc.hpp"
#include "test_util.hpp"

using namespace bpa;
using namespace bpa::imgproc;
using bpa::testing::binary_from;
using bpa::testing::Gen;

namespace {

ColorImage rgb_pixel(int r, int g, int b) {
  return {1, 1, 3, {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)}};
}

GrayImage gray_of(int w, int h, std::vector<std::uint8_t> px) { return GrayImage(w, h, std::move(px)); }

}  // namespace

TEST(ToGray, FixedLumaWeights) {
  EXPECT_EQ(to_gray(rgb_pixel(255, 255, 255)).pixels[0], 255);
  EXPECT_EQ(to_gray(rgb_pixel(0, 0, 0)).pixels[0], 0);
  EXPECT_EQ(to_gray(rgb_pixel(100, 100, 100)).pixels[0], 100);
  // 0.2989*200 + 0.5870*10 + 0.1140*50 = 71.35
  EXPECT_EQ(to_gray(rgb_pixel(200, 10, 50)).pixels[0], 71);
}

TEST(ToGray, SingleChannelPassesThrough) {
  ColorImage c{2, 1, 1, {7, 250}};
  EXPECT_EQ(to_gray(c).pixels, (std::vector<std::uint8_t>{7, 250}));
}

TEST(ToGray, RejectsUnsupportedChannelCount) {
  ColorImage c{1, 1, 4, {1, 2, 3, 4}};
  EXPECT_THROW(to_gray(c), InvalidInput);
}

TEST(Invert, MapsXTo255MinusX) {
  const auto g = invert(gray_of(3, 1, {0, 255, 100}));
  EXPECT_EQ(g.pixels, (std::vector<std::uint8_t>{255, 0, 155}));
}

TEST(Binarize, FixedThresholdOnZeros) {
  const auto b = binarize(gray_of(2, 2, {0, 0, 0, 0}), ThresholdSpec::fixed(10));
  EXPECT_EQ(count_foreground(b), 0u);
}

TEST(Binarize, AutomaticTwoLevel) {
  const auto r = binarize_with_threshold(gray_of(2, 1, {0, 255}), ThresholdSpec::automatic());
  EXPECT_EQ(r.bits.pixels, (std::vector<std::uint8_t>{0, 1}));
}

TEST(Binarize, FixedThresholdHalfHalf) {
  const auto b = binarize(gray_of(4, 1, {40, 200, 40, 200}), ThresholdSpec::fixed(100));
  EXPECT_EQ(count_foreground(b), 2u);
}

TEST(Binarize, StrictlyGreaterThanThreshold) {
  const auto b = binarize(gray_of(3, 1, {99, 100, 101}), ThresholdSpec::fixed(100));
  EXPECT_EQ(b.pixels, (std::vector<std::uint8_t>{0, 0, 1}));
}

TEST(Binarize, UniformImageWarnsAndYieldsZeros) {
  Diagnostics diag;
  const auto r = binarize_with_threshold(gray_of(3, 3, std::vector<std::uint8_t>(9, 77)), ThresholdSpec::automatic(),
                                         &diag);
  EXPECT_EQ(r.threshold, 77);
  EXPECT_EQ(count_foreground(r.bits), 0u);
  EXPECT_EQ(diag.warnings.size(), 1u);
}

TEST(ThresholdSpec, Parse) {
  EXPECT_TRUE(ThresholdSpec::parse("auto").is_auto());
  EXPECT_EQ(ThresholdSpec::parse("128").value(), 128);
  EXPECT_THROW(ThresholdSpec::parse("256"), InvalidInput);
  EXPECT_THROW(ThresholdSpec::parse("-1"), InvalidInput);
  EXPECT_THROW(ThresholdSpec::parse("abc"), InvalidInput);
}

// Brute-force Otsu: evaluate the between-class variance for every t directly
// from the pixel list.
TEST(Otsu, MatchesBruteForceOnRandomImages) {
  Gen g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = g.integer(2, 200);
    std::vector<std::uint8_t> px(n);
    const int a = g.integer(0, 255);
    const int b = g.integer(0, 255);
    for (auto& p : px) {
      p = static_cast<std::uint8_t>(g.coin() ? g.integer(std::min(a, b), std::max(a, b)) : g.integer(0, 255));
    }
    const auto img = gray_of(n, 1, px);
    int best_t = -1;
    double best = -1.0;
    for (int t = 0; t < 256; ++t) {
      double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
      for (auto p : px) {
        if (p <= t) {
          ++n0;
          s0 += p;
        } else {
          ++n1;
          s1 += p;
        }
      }
      if (n0 == 0 || n1 == 0) continue;
      const double w0 = n0 / n;
      const double w1 = n1 / n;
      const double d = s0 / n0 - s1 / n1;
      const double v = w0 * w1 * d * d;
      if (v > best * (1 + 1e-12) + 1e-12) {
        best = v;
        best_t = t;
      }
    }
    const auto t = otsu_threshold(img);
    if (best_t < 0) {
      EXPECT_FALSE(t.has_value());
    } else {
      ASSERT_TRUE(t.has_value());
      EXPECT_EQ(*t, best_t) << "trial " << trial;
    }
  }
}

TEST(Label, CornerTouchIsOneRegion) {
  const auto l = label_components(binary_from({"#.", ".#"}));
  EXPECT_EQ(l.region_count, 1);
}

TEST(Label, GapMakesTwoRegions) {
  const auto l = label_components(binary_from({"#.#"}));
  EXPECT_EQ(l.region_count, 2);
  EXPECT_EQ(l.at(0, 0), 1);
  EXPECT_EQ(l.at(2, 0), 2);
}

TEST(Label, EmptyImage) {
  EXPECT_EQ(label_components(binary_from({"...", "..."})).region_count, 0);
  EXPECT_EQ(label_components(BinaryImage(0, 0)).region_count, 0);
}

TEST(Label, RasterOrderOfFirstPixel) {
  // The U's right arm gets a provisional label of its own in row 0 and is
  // merged in row 2; final labels still follow first-pixel raster order.
  const auto l = label_components(binary_from({
      "#.#..#",
      "#.#...",
      "###.#.",
  }));
  EXPECT_EQ(l.region_count, 3);
  EXPECT_EQ(l.at(0, 0), 1);
  EXPECT_EQ(l.at(2, 0), 1);
  EXPECT_EQ(l.at(5, 0), 2);
  EXPECT_EQ(l.at(4, 2), 3);
}

TEST(FillHoles, RingCenterFilled) {
  const auto f = fill_holes(binary_from({"###", "#.#", "###"}));
  EXPECT_EQ(count_foreground(f), 9u);
}

TEST(FillHoles, SolidAndEmptyUnchanged) {
  const auto solid = binary_from({"###", "###"});
  EXPECT_EQ(fill_holes(solid), solid);
  const auto empty = binary_from({"...", "..."});
  EXPECT_EQ(fill_holes(empty), empty);
}

TEST(FillHoles, DiagonalLeakIsNotAnEscape) {
  // Background reaches the center only diagonally, so the center is a hole.
  const auto f = fill_holes(binary_from({
      ".#.",
      "#.#",
      ".#.",
  }));
  EXPECT_EQ(f.at(1, 1), 1);
  EXPECT_EQ(f.at(0, 0), 0);
}
