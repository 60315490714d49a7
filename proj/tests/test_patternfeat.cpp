#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bpa/patternfeat/binning.hpp"
#include "bpa/patternfeat/consolidate.hpp"
#include "bpa/patternfeat/directional.hpp"
#include "bpa/patternfeat/features.hpp"
#include "bpa/patternfeat/summary.hpp"
#include "test_util.hpp"

using namespace bpa;
using namespace bpa::patternfeat;
using bpa::testing::Gen;
using regions::Point2;

namespace {

/// Stain of the given pixel area at (x, y); axes 10 x 5, orientation 20 deg.
stainfeat::StainFeatures stain(double x, double y, std::int64_t area) {
  stainfeat::StainFeatures s;
  s.region.ellipse.centroid = {x, y};
  s.region.ellipse.major_axis_length = 10.0;
  s.region.ellipse.minor_axis_length = 5.0;
  s.region.ellipse.orientation = 20.0;
  s.region.pixel_area = s.region.filled_area = area;
  s.region.solidity = 0.9;
  s.impact_angle = std::asin(0.5);
  s.epsilon = 0.5;
  return s;
}

/// Pattern whose centroid/distances are computed exactly as in the pipeline.
stainfeat::PatternStains pattern_of(std::vector<stainfeat::StainFeatures> stains) {
  std::vector<regions::StainRegion> rs;
  for (const auto& s : stains) rs.push_back(s.region);
  return stainfeat::compute_stain_features(rs);
}

PatternMeta meta_600dpi() {
  PatternMeta m;
  m.pattern_id = "p";
  m.px_per_mm = pixels_per_mm(600.0);
  m.image_width = 2000;
  m.image_height = 2000;
  return m;
}

}  // namespace

TEST(Registry, FortyEightUniqueNames) {
  EXPECT_EQ(kFeatureNames.size(), 48u);
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    EXPECT_EQ(feature_index(kFeatureNames[i]), i);
  }
  EXPECT_EQ(kFeatureNames[46], "mean_shade");
  EXPECT_EQ(kFeatureNames[47], "mean_evenness");
  EXPECT_FALSE(feature_index("nope").has_value());
  EXPECT_THROW(feature_id("nope"), InvalidInput);
}

TEST(Consolidate, Examples) {
  const std::vector<double> a{2, 4, 6};
  EXPECT_DOUBLE_EQ(*mean(a), 4.0);
  const std::vector<double> b{3, 3, 3};
  EXPECT_DOUBLE_EQ(*sd(b), 0.0);
  const std::vector<double> none;
  EXPECT_FALSE(mean(none).has_value());
  EXPECT_FALSE(sd(none).has_value());
  EXPECT_FALSE(ratio(std::span<const double>(none), [](double) { return true; }).has_value());
  EXPECT_EQ(count_if(std::span<const double>(none), [](double) { return true; }), 0u);
  // Population sd of {1, 3} is 1.
  const std::vector<double> c{1, 3};
  EXPECT_DOUBLE_EQ(*sd(c), 1.0);
  EXPECT_EQ(index_of(std::span<const double>(a), [](double x) { return x > 3; }), (std::vector<std::size_t>{1, 2}));
}

TEST(AngularVariance, Examples) {
  const std::vector<double> same{33, 33, 33};
  EXPECT_NEAR(*angular_variance(same), 0.0, 1e-15);
  const std::vector<double> anti{0, 180};
  EXPECT_NEAR(*angular_variance(anti), 1.0, 1e-15);
  const std::vector<double> pair{10, 350};
  EXPECT_NEAR(*angular_variance(pair), 1.0 - std::cos(10.0 * std::numbers::pi / 180.0), 1e-12);
  EXPECT_NEAR(*circular_mean(pair), 0.0, 1e-12);
  EXPECT_FALSE(angular_variance(std::vector<double>{}).has_value());
}

TEST(IncidentVector, Examples) {
  for (double beta : {-1.5, 0.0, 0.7}) {
    const auto m = incident_vector(std::numbers::pi / 2.0, beta);
    EXPECT_NEAR(m.x(), 0.0, 1e-15);
    EXPECT_NEAR(m.y(), 0.0, 1e-15);
    EXPECT_NEAR(m.z(), 1.0, 1e-15);
  }
  const auto m = incident_vector(0.0, 0.0);
  EXPECT_DOUBLE_EQ(m.x(), -1.0);
  EXPECT_DOUBLE_EQ(m.y(), 0.0);
  EXPECT_DOUBLE_EQ(m.z(), 0.0);
  Gen g(3);
  for (int i = 0; i < 100; ++i) {
    EXPECT_NEAR(incident_vector(g.uniform(0, 1.57), g.uniform(-1.57, 1.57)).norm(), 1.0, 1e-14);
  }
}

TEST(Scatter, RankOneAndIdentity) {
  const std::vector<Eigen::Vector3d> up(4, Eigen::Vector3d(0, 0, 1));
  const auto s = *scatter_summary(up);
  EXPECT_DOUBLE_EQ(s.eigenvalues[0], 4.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[1], 0.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[2], 0.0);
  EXPECT_DOUBLE_EQ(s.spheri_det, 0.0);
  EXPECT_FALSE(s.spheri_ratio.has_value());

  const std::vector<Eigen::Vector3d> basis{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const auto t = *scatter_summary(basis);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(t.eigenvalues[i], 1.0, 1e-12);
  EXPECT_NEAR(*t.spheri_ratio, 1.0, 1e-12);
  EXPECT_NEAR(t.spheri_det, 1.0, 1e-12);
  EXPECT_FALSE(scatter_summary(std::vector<Eigen::Vector3d>{}).has_value());
}

TEST(Binning, HalfOpenBins) {
  const auto s = BinningScheme::fixed_annuli({0, 0}, 1.0);  // width 25 px
  EXPECT_EQ(bin_of(0.0, s), 1);
  EXPECT_EQ(bin_of(24.999, s), 1);
  EXPECT_EQ(bin_of(25.0, s), 2);
  EXPECT_EQ(bin_of(40 * 25.0 - 1e-9, s), 40);
  EXPECT_FALSE(bin_of(40 * 25.0, s).has_value());
  EXPECT_FALSE(bin_of(41 * 25.0, s).has_value());
  BinningScheme bad = s;
  bad.width = 0.0;
  EXPECT_THROW(bin_of(1.0, bad), InvalidInput);
}

TEST(Binning, RectangularUsesVerticalOffset) {
  const auto s = BinningScheme::fixed_rectangular({50, 50}, 1.0);
  const std::vector<Point2> ps{{1000, 50}, {50, 80}, {50, 20}};
  const auto b = assign_bins(ps, s);
  EXPECT_EQ(b[0], 1);
  EXPECT_EQ(b[1], 2);
  EXPECT_EQ(b[2], 2);
}

TEST(Binning, PixelsPerMm) {
  EXPECT_NEAR(pixels_per_mm(600.0), 23.622047, 1e-6);
  const auto t = LargeStainThresholds::for_resolution(pixels_per_mm(600.0));
  EXPECT_NEAR(t.large_1, 17.53, 0.01);
  EXPECT_NEAR(t.large_75, 9.86, 0.01);
}

TEST(FeatureVector, CountsAndRatios) {
  std::vector<stainfeat::StainFeatures> ss;
  for (int i = 0; i < 5; ++i) ss.push_back(stain(1000.0 + 3 * i, 1000.0 + 2 * i, 5));
  const auto f = build_feature_vector(pattern_of(ss), meta_600dpi());
  EXPECT_EQ(*f["num_stains"], 5.0);
  EXPECT_EQ(*f["num_large_1"], 0.0);
  EXPECT_EQ(*f["num_large_75"], 0.0);
  EXPECT_EQ(*f["ratio_large_1"], 0.0);
  EXPECT_EQ(*f["ratio_large_75"], 0.0);
  EXPECT_DOUBLE_EQ(*f["mean_area"], 5.0);
  EXPECT_DOUBLE_EQ(*f["mean_maj_length"], 10.0);
  EXPECT_DOUBLE_EQ(*f["sd_epsilon"], 0.0);
  // Every stain lies within 25 mm of the centroid: rings 5-15 and up are empty.
  EXPECT_FALSE(f["fract1_ring_15_25"].has_value());
  EXPECT_FALSE(f["fract1_ring_5_15"].has_value());
  EXPECT_EQ(*f["i"], 1.0);
  EXPECT_EQ(*f["m"], 5.0);
}

TEST(FeatureVector, LargeStainThresholdsAndRings) {
  const double ppmm = pixels_per_mm(600.0);
  const double w = 25.0 * ppmm;
  std::vector<stainfeat::StainFeatures> ss;
  // Four small stains pin the median centroid at (1000,1000); two more sit in
  // fixed ring 6 and one in ring 16.
  for (int i = 0; i < 4; ++i) ss.push_back(stain(1000, 1000, 5));
  ss.push_back(stain(1000 + 5.5 * w, 1000, 12));
  ss.push_back(stain(1000 + 5.2 * w, 1000, 5));
  ss.push_back(stain(1000 + 15.5 * w, 1000, 20));
  auto meta = meta_600dpi();
  meta.image_width = meta.image_height = 200000;
  const auto f = build_feature_vector(pattern_of(ss), meta);
  EXPECT_EQ(*f["num_large_1"], 1.0);   // area 20 > 17.53
  EXPECT_EQ(*f["num_large_75"], 2.0);  // plus area 12 > 9.86
  EXPECT_DOUBLE_EQ(*f["ratio_large_1"], 1.0 / 7.0);
  EXPECT_EQ(*f["i"], 1.0);
  EXPECT_EQ(*f["m"], 4.0);
  EXPECT_DOUBLE_EQ(*f["fract1_ring_5_15"], 0.0);
  EXPECT_DOUBLE_EQ(*f["fract75_ring_5_15"], 0.5);
  EXPECT_DOUBLE_EQ(*f["fract1_ring_15_25"], 1.0);
  EXPECT_FALSE(f["fract1_ring_25_35"].has_value());
}

TEST(FeatureVector, NeedsTwoStains) {
  EXPECT_THROW(build_feature_vector(pattern_of({stain(1, 1, 5)}), meta_600dpi()), InvalidInput);
}

TEST(FeatureVector, CoincidentStainsLeaveAdaptiveFeaturesMissing) {
  const auto f = build_feature_vector(pattern_of({stain(5, 5, 5), stain(5, 5, 5)}), meta_600dpi());
  EXPECT_FALSE(f["adp_i"].has_value());
  EXPECT_FALSE(f["mean_ratio_dis"].has_value());
  EXPECT_FALSE(f["rec_adp_bin_ratio"].has_value());
}

TEST(BoxSummary, Examples) {
  const auto c = box_summary({5.0, 5.0, 5.0});
  EXPECT_EQ(c.q1, 5.0);
  EXPECT_EQ(c.median, 5.0);
  EXPECT_EQ(c.q3, 5.0);
  EXPECT_TRUE(c.outliers.empty());

  const auto o = box_summary({1.0, 2.0, 3.0, 4.0, 100.0});
  EXPECT_EQ(o.q1, 2.0);
  EXPECT_EQ(o.q3, 4.0);
  ASSERT_EQ(o.outliers.size(), 1u);
  EXPECT_EQ(o.outliers[0], 100.0);
  EXPECT_EQ(o.whisker_high, 4.0);

  const auto e = box_summary({std::nullopt, std::nullopt});
  EXPECT_FALSE(e.has_data);
  EXPECT_EQ(e.missing, 2u);
}

TEST(ClassSummary, DisjointSupports) {
  std::vector<PatternFeatures> ps;
  for (int i = 0; i < 6; ++i) {
    PatternFeatures p;
    p.meta.label = i % 2;
    p["mean_area"] = (i % 2 == 1 ? 10.0 : 100.0) + i;
    ps.push_back(p);
  }
  const auto s = class_summary(ps, "mean_area");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_LT(s.at(1).max, s.at(0).min);
}
