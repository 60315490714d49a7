// In-memory walk through the whole pipeline: render synthetic patterns,
// extract features, then run repeated boosted fits and print SIS scores.

#include <iostream>

#include "bpa/harness/experiment.hpp"
#include "bpa/harness/pipeline.hpp"
#include "bpa/harness/synth.hpp"
#include "bpa/patternfeat/binning.hpp"

int main() {
  using namespace bpa;
  auto spec = harness::SynthSpec::defaults();
  spec.width = spec.height = 500;
  spec.gunshot.patterns = spec.impact.patterns = 12;
  spec.gunshot.stains.spread_px = spec.impact.stains.spread_px = 90.0;

  std::vector<patternfeat::PatternFeatures> patterns;
  for (const auto& p : harness::synth_generate(spec)) {
    patternfeat::PatternMeta meta{p.id, p.label, p.bt_distance_cm, patternfeat::pixels_per_mm(spec.dpi), 0, 0};
    auto r = harness::process_image(p.image, meta);
    if (r.features) patterns.push_back(*r.features);
  }
  const auto m = learn::FeatureMatrix::from_patterns(patterns);
  std::cout << m.rows() << " patterns with features\n";

  harness::ExperimentConfig cfg;
  cfg.reps = 20;
  cfg.seed = 3;
  const auto res = harness::run_experiment(m, cfg);
  std::cout << "mean test accuracy: " << res.summary.mean_accuracy << "\n";
  const auto ranked = learn::rank_features(res.sis.score);
  for (std::size_t i = 0; i < 5; ++i) {
    std::cout << "  " << res.sis.features[ranked[i]] << "  SIS " << res.sis.score[ranked[i]] << "\n";
  }
}
