#pragma once

// Manifest-driven batch extraction. Requires the bpa_io target (OpenCV codecs).

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bpa/harness/feature_table.hpp"
#include "bpa/harness/manifest.hpp"
#include "bpa/harness/pipeline.hpp"
#include "bpa/imgproc/image_io.hpp"
#include "bpa/learn/parallel.hpp"
#include "bpa/patternfeat/binning.hpp"

namespace bpa::harness {

enum class RecordStatus { kOk, kSkipped, kError };

inline const char* to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::kOk: return "ok";
    case RecordStatus::kSkipped: return "skipped";
    case RecordStatus::kError: return "error";
  }
  return "error";
}

/// Outcome for one manifest record, in manifest order.
struct RecordOutcome {
  std::filesystem::path path;
  std::string pattern_id;
  RecordStatus status = RecordStatus::kOk;
  std::string detail;
  std::size_t regions_detected = 0;
  std::size_t stains_kept = 0;
  int threshold = 0;
  std::vector<std::string> warnings;
};

struct ExtractResult {
  std::vector<patternfeat::PatternFeatures> patterns;
  std::vector<RecordOutcome> outcomes;

  [[nodiscard]] std::size_t count(RecordStatus s) const {
    std::size_t c = 0;
    for (const auto& o : outcomes) c += o.status == s ? 1 : 0;
    return c;
  }
};

struct ExtractOptions {
  PipelineOptions pipeline;
  /// Directory for per-image region CSVs; empty disables the dump.
  std::filesystem::path debug_dir;
  unsigned threads = 1;
};

/// Pattern ids are file stems, suffixed with the record index on collision.
inline std::vector<std::string> pattern_ids(const DatasetManifest& m) {
  std::map<std::string, int> uses;
  for (const auto& r : m.records) ++uses[r.path.stem().string()];
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto stem = m.records[i].path.stem().string();
    ids.push_back(uses[stem] > 1 ? stem + "_" + std::to_string(i) : stem);
  }
  return ids;
}

inline ExtractResult extract(const DatasetManifest& manifest, const ExtractOptions& opt = {}) {
  const auto ids = pattern_ids(manifest);
  const std::size_t n = manifest.records.size();
  std::vector<RecordOutcome> outcomes(n);
  std::vector<std::optional<patternfeat::PatternFeatures>> features(n);

  parallel_for(n, opt.threads, [&](std::size_t i) {
    const auto& rec = manifest.records[i];
    auto& out = outcomes[i];
    out.path = rec.path;
    out.pattern_id = ids[i];
    try {
      const auto image = imgproc::read_image(rec.path);
      patternfeat::PatternMeta meta;
      meta.pattern_id = ids[i];
      meta.label = static_cast<int>(rec.label);
      meta.bt_distance_cm = rec.bt_distance_cm;
      meta.px_per_mm = patternfeat::pixels_per_mm(rec.dpi);
      auto pipeline = opt.pipeline;
      pipeline.keep_regions = !opt.debug_dir.empty();
      auto result = process_image(image, meta, pipeline);
      out.regions_detected = result.regions_detected;
      out.stains_kept = result.stains_kept;
      out.threshold = result.threshold;
      out.warnings = result.diagnostics.warnings;
      if (!opt.debug_dir.empty()) {
        write_atomic(opt.debug_dir / (ids[i] + "_regions.csv"), region_debug_csv(result));
      }
      if (result.features) {
        features[i] = std::move(result.features);
      } else {
        out.status = RecordStatus::kSkipped;
        out.detail = std::to_string(result.stains_kept) + " stain(s) after filtering, need at least " +
                     std::to_string(patternfeat::kMinStains);
      }
    } catch (const std::exception& e) {
      out.status = RecordStatus::kError;
      out.detail = e.what();
    }
  });

  ExtractResult res;
  res.outcomes = std::move(outcomes);
  for (auto& f : features) {
    if (f) res.patterns.push_back(std::move(*f));
  }
  return res;
}

inline std::string outcomes_csv(const ExtractResult& r) {
  std::vector<CsvRow> rows;
  for (const auto& o : r.outcomes) {
    std::string warnings;
    for (const auto& w : o.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
    rows.push_back({o.path.generic_string(), o.pattern_id, to_string(o.status), o.detail,
                    std::to_string(o.regions_detected), std::to_string(o.stains_kept), std::to_string(o.threshold),
                    warnings});
  }
  return to_csv_text({"path", "pattern_id", "status", "detail", "regions_detected", "stains_kept", "threshold",
                      "warnings"},
                     rows);
}

}  // namespace bpa::harness
