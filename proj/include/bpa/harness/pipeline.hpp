#pragma once

// Image -> feature vector for one decoded pattern image. No file I/O here;
// see extract.hpp for manifest-driven batch processing.

#include <optional>
#include <string>
#include <vector>

#include "bpa/diagnostics.hpp"
#include "bpa/harness/csv.hpp"
#include "bpa/imgproc/imgproc.hpp"
#include "bpa/patternfeat/features.hpp"
#include "bpa/regions/regions.hpp"
#include "bpa/stainfeat/stainfeat.hpp"

namespace bpa::harness {

struct PipelineOptions {
  imgproc::ThresholdSpec threshold = imgproc::ThresholdSpec::automatic();
  regions::StainFilter filter;
  /// Keep per-region detail for debug dumps.
  bool keep_regions = false;
};

struct PatternResult {
  int threshold = 0;
  std::size_t regions_detected = 0;
  /// Present when the pattern kept at least two stains.
  std::optional<patternfeat::PatternFeatures> features;
  std::size_t stains_kept = 0;
  std::vector<regions::StainRegion> all_regions;
  std::vector<regions::RemovalReason> removal;
  stainfeat::PatternStains kept;
  Diagnostics diagnostics;
};

inline PatternResult process_image(const imgproc::ColorImage& image, const patternfeat::PatternMeta& meta,
                                   const PipelineOptions& opt = {}) {
  PatternResult out;
  const auto inverted = imgproc::invert(imgproc::to_gray(image));
  const auto bin = imgproc::binarize_with_threshold(inverted, opt.threshold, &out.diagnostics);
  out.threshold = bin.threshold;
  const auto labels = imgproc::label_components(bin.bits);
  auto all = regions::region_props(labels, inverted);
  out.regions_detected = all.size();

  std::vector<regions::StainRegion> kept;
  std::vector<regions::RemovalReason> reasons;
  reasons.reserve(all.size());
  for (const auto& r : all) {
    reasons.push_back(regions::removal_reason(r, opt.filter));
    if (reasons.back() == regions::RemovalReason::kNone) kept.push_back(r);
  }
  out.stains_kept = kept.size();
  out.kept = stainfeat::compute_stain_features(kept);
  if (kept.size() >= patternfeat::kMinStains) {
    auto m = meta;
    m.image_width = image.width;
    m.image_height = image.height;
    out.features = patternfeat::build_feature_vector(out.kept, m);
  }
  if (opt.keep_regions) {
    out.all_regions = std::move(all);
    out.removal = std::move(reasons);
  }
  return out;
}

/// One row per detected region with every region field, the filter verdict
/// and, for retained stains, the derived stain features.
inline std::string region_debug_csv(const PatternResult& r) {
  const CsvRow header{"label", "pixel_area", "filled_area", "convex_area", "centroid_x", "centroid_y",
                      "major_axis_length", "minor_axis_length", "orientation", "eccentricity", "solidity",
                      "vertical_angle", "shade", "evenness", "status", "impact_angle", "epsilon", "distance",
                      "ratio_distance"};
  std::vector<CsvRow> rows;
  std::size_t kept_index = 0;
  for (std::size_t i = 0; i < r.all_regions.size(); ++i) {
    const auto& s = r.all_regions[i];
    const auto& e = s.ellipse;
    CsvRow row{std::to_string(s.label),        std::to_string(s.pixel_area),  std::to_string(s.filled_area),
               std::to_string(s.convex_area),  format_number(e.centroid.x),   format_number(e.centroid.y),
               format_number(e.major_axis_length), format_number(e.minor_axis_length),
               format_number(e.orientation),   format_number(e.eccentricity), format_number(s.solidity),
               format_number(s.vertical_angle), format_number(s.shade),       format_number(s.evenness),
               regions::to_string(r.removal[i])};
    if (r.removal[i] == regions::RemovalReason::kNone && kept_index < r.kept.stains.size()) {
      const auto& f = r.kept.stains[kept_index++];
      row.push_back(format_number(f.impact_angle));
      row.push_back(format_number(f.epsilon));
      row.push_back(format_number(f.distance));
      row.push_back(format_optional(f.ratio_distance));
    } else {
      row.insert(row.end(), {format_number(regions::impact_angle(e)), "", "", ""});
    }
    rows.push_back(std::move(row));
  }
  return to_csv_text(header, rows);
}

}  // namespace bpa::harness
