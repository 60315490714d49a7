#pragma once

#include <filesystem>

#include "bpa/harness/csv.hpp"
#include "bpa/harness/manifest.hpp"
#include "bpa/harness/synth.hpp"
#include "bpa/imgproc/image_io.hpp"

namespace bpa::harness {

struct SynthDataset {
  DatasetManifest manifest;
  std::filesystem::path manifest_path;
  std::filesystem::path truth_path;
};

/// Writes `<dir>/images/<id>.png`, `<dir>/manifest.csv` and `<dir>/truth.csv`.
inline SynthDataset write_synthetic_dataset(const SynthSpec& spec, const std::filesystem::path& dir) {
  const auto patterns = synth_generate(spec);
  std::filesystem::create_directories(dir / "images");
  SynthDataset ds;
  std::vector<CsvRow> truth;
  for (const auto& p : patterns) {
    const auto path = dir / "images" / (p.id + ".png");
    imgproc::write_image(path, p.image);
    ds.manifest.records.push_back({path, p.label == 1 ? PatternClass::kGunshot : PatternClass::kImpact,
                                   p.bt_distance_cm, spec.dpi});
    for (std::size_t k = 0; k < p.stains.size(); ++k) {
      const auto& s = p.stains[k];
      truth.push_back({p.id, std::to_string(k), format_number(s.cx), format_number(s.cy), format_number(s.major),
                       format_number(s.minor), format_number(s.orientation_deg), std::to_string(s.pixel_area)});
    }
  }
  ds.manifest_path = dir / "manifest.csv";
  ds.truth_path = dir / "truth.csv";
  write_atomic(ds.manifest_path, manifest_csv(ds.manifest, dir));
  write_atomic(ds.truth_path, to_csv_text({"pattern_id", "stain", "centroid_x", "centroid_y", "major_axis_length",
                                           "minor_axis_length", "orientation", "pixel_area"},
                                          truth));
  return ds;
}

}  // namespace bpa::harness
