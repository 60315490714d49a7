// bpa: bloodstain pattern feature extraction, synthetic data and model experiments.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bpa/harness/experiment.hpp"
#include "bpa/harness/extract.hpp"
#include "bpa/harness/feature_table.hpp"
#include "bpa/harness/manifest.hpp"
#include "bpa/harness/synth_io.hpp"

namespace fs = std::filesystem;
using namespace bpa;

namespace {

struct DataOptions {
  std::string manifest;
  std::string features;
  std::string threshold = "auto";
  bool keep_circular = false;
  bool debug_regions = false;
};

struct ModelOptions {
  std::string model = "boosted";
  std::string impute;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  bool tune = false;
  std::size_t folds = 5;
  learn::BoostedParams boosted;
  learn::ForestParams forest;
};

struct Common {
  std::string out = ".";
  unsigned threads = 1;
  bool lenient = false;
};

void add_data_flags(CLI::App* app, DataOptions& d) {
  app->add_option("--manifest", d.manifest, "Dataset manifest (CSV path,label,bt_distance_cm,dpi or JSON)");
  app->add_option("--features", d.features, "Feature CSV produced by `extract`");
  app->add_option("--threshold", d.threshold, "Binarization threshold: auto or 0-255");
  app->add_flag("--keep-circular", d.keep_circular, "Do not remove near-circular stains (eccentricity <= 0.3)");
  app->add_flag("--debug-regions", d.debug_regions, "Write per-image region CSVs to <out>/regions/");
}

void add_model_flags(CLI::App* app, ModelOptions& m) {
  app->add_option("--model", m.model, "boosted or forest")->check(CLI::IsMember({"boosted", "forest"}));
  app->add_option("--impute", m.impute, "knn, zero or none")->check(CLI::IsMember({"knn", "zero", "none"}));
  app->add_option("--k", m.k, "Neighbours for knn imputation");
  app->add_option("--seed", m.seed, "Root seed for every random choice");
  app->add_flag("--tune", m.tune, "Pick hyper-parameters by cross-validated grid search");
  app->add_option("--folds", m.folds, "Folds for --tune");
  app->add_option("--trees", m.boosted.n_trees, "Boosted: number of rounds");
  app->add_option("--depth", m.boosted.max_depth, "Boosted: maximum depth");
  app->add_option("--eta", m.boosted.learning_rate, "Boosted: learning rate");
  app->add_option("--lambda", m.boosted.lambda, "Boosted: L2 penalty on leaf weights");
  app->add_option("--gamma", m.boosted.gamma, "Boosted: minimum split gain");
  app->add_option("--min-child-weight", m.boosted.min_child_weight, "Boosted: minimum hessian per child");
  app->add_option("--forest-trees", m.forest.n_trees, "Forest: number of trees");
  app->add_option("--forest-depth", m.forest.max_depth, "Forest: maximum depth (0 = unlimited)");
  app->add_option("--mtry", m.forest.features_per_split, "Forest: features per split (0 = sqrt)");
  app->add_option("--min-leaf", m.forest.min_leaf_size, "Forest: minimum rows per leaf");
}

void add_common_flags(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  app->add_flag("--lenient", c.lenient, "Exit 0 even when some images failed");
}

harness::ExtractOptions extract_options(const DataOptions& d, const Common& c) {
  harness::ExtractOptions opt;
  opt.pipeline.threshold = imgproc::ThresholdSpec::parse(d.threshold);
  opt.pipeline.filter.remove_near_circular = !d.keep_circular;
  if (d.debug_regions) opt.debug_dir = fs::path(c.out) / "regions";
  opt.threads = c.threads;
  return opt;
}

/// Runs extraction, writes features.csv and extract_report.csv, and returns
/// the number of per-file errors.
std::size_t run_extract(const DataOptions& d, const Common& c, learn::FeatureMatrix* out) {
  const auto manifest = harness::read_manifest(d.manifest);
  const auto opt = extract_options(d, c);
  fs::create_directories(c.out);
  if (!opt.debug_dir.empty()) fs::create_directories(opt.debug_dir);
  const auto result = harness::extract(manifest, opt);
  const auto matrix = learn::FeatureMatrix::from_patterns(result.patterns);
  harness::write_atomic(fs::path(c.out) / "features.csv", harness::feature_csv(matrix));
  harness::write_atomic(fs::path(c.out) / "extract_report.csv", harness::outcomes_csv(result));
  for (const auto& o : result.outcomes) {
    if (o.status != harness::RecordStatus::kOk) {
      std::cerr << harness::to_string(o.status) << ": " << o.path.string() << ": " << o.detail << "\n";
    }
  }
  std::cerr << "extracted " << result.patterns.size() << " of " << result.outcomes.size() << " pattern(s), "
            << result.count(harness::RecordStatus::kSkipped) << " skipped, "
            << result.count(harness::RecordStatus::kError) << " error(s)\n";
  if (out) *out = matrix;
  return result.count(harness::RecordStatus::kError);
}

/// Loads --features, or extracts from --manifest when no feature CSV is given.
learn::FeatureMatrix load_matrix(const DataOptions& d, const Common& c, std::size_t* errors) {
  if (!d.features.empty()) return harness::read_feature_csv(d.features);
  if (d.manifest.empty()) throw InvalidInput("need --features or --manifest");
  learn::FeatureMatrix m;
  *errors = run_extract(d, c, &m);
  return m;
}

harness::ExperimentConfig experiment_config(const ModelOptions& m, std::size_t reps, unsigned threads) {
  harness::ExperimentConfig cfg;
  cfg.model = learn::parse_model_kind(m.model);
  if (!m.impute.empty()) cfg.imputation = learn::parse_imputation(m.impute);
  cfg.k = m.k;
  cfg.reps = reps;
  cfg.seed = m.seed;
  cfg.tune = m.tune;
  cfg.folds = m.folds;
  cfg.threads = threads;
  cfg.params.kind = cfg.model;
  cfg.params.boosted = m.boosted;
  cfg.params.forest = m.forest;
  return cfg;
}

int exit_code(std::size_t errors, const Common& c) { return errors == 0 || c.lenient ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloodstain pattern analysis: feature extraction and gunshot/impact classification"};
  app.require_subcommand(1);

  DataOptions data;
  ModelOptions model;
  Common common;
  std::size_t reps = harness::kDefaultSisReps;
  bool fast = false;
  std::string synth_config;
  std::string model_file;
  std::optional<std::uint64_t> synth_seed;
  std::optional<int> synth_patterns;

  auto* extract = app.add_subcommand("extract", "Images in a manifest -> features.csv + extract_report.csv");
  add_data_flags(extract, data);
  add_common_flags(extract, common);
  extract->get_option("--manifest")->required();

  auto* synth = app.add_subcommand("synth", "Render a synthetic dataset: images/, manifest.csv, truth.csv");
  synth->add_option("--config", synth_config, "JSON overrides for the generator settings");
  synth->add_option("--seed", synth_seed, "Overrides the config seed");
  synth->add_option("--patterns", synth_patterns, "Patterns per class");
  synth->add_option("--out", common.out, "Output directory");

  auto* train = app.add_subcommand("train", "Fit one model on every row -> model.json");
  add_data_flags(train, data);
  add_model_flags(train, model);
  add_common_flags(train, common);

  auto* evaluate = app.add_subcommand("evaluate", "Repeated 75/25 fits -> evaluation.json + evaluation.csv");
  add_data_flags(evaluate, data);
  add_model_flags(evaluate, model);
  add_common_flags(evaluate, common);
  evaluate->add_option("--reps", reps, "Number of repeated fits");
  evaluate->add_flag("--fast", fast, "Use 50 repetitions");
  evaluate->add_option("--model-file", model_file, "Score a saved model on every row instead of refitting");

  auto* sis = app.add_subcommand("sis", "Stability importance scores -> sis.json + sis.csv");
  add_data_flags(sis, data);
  add_model_flags(sis, model);
  add_common_flags(sis, common);
  sis->add_option("--reps", reps, "Number of repeated fits");
  sis->add_flag("--fast", fast, "Use 50 repetitions");

  auto* report = app.add_subcommand("report", "Per-class boxplot data for every feature -> class_summary.json");
  add_data_flags(report, data);
  add_common_flags(report, common);

  CLI11_PARSE(app, argc, argv);
  if (fast) reps = harness::kFastReps;

  try {
    if (extract->parsed()) {
      return exit_code(run_extract(data, common, nullptr), common);
    }

    if (synth->parsed()) {
      nlohmann::json j = nlohmann::json::object();
      if (!synth_config.empty()) j = nlohmann::json::parse(harness::read_text(synth_config));
      auto spec = harness::synth_spec_from_json(j);
      if (synth_seed) spec.seed = *synth_seed;
      if (synth_patterns) spec.gunshot.patterns = spec.impact.patterns = *synth_patterns;
      const auto ds = harness::write_synthetic_dataset(spec, common.out);
      std::cerr << "wrote " << ds.manifest.records.size() << " image(s) and " << ds.manifest_path.string() << "\n";
      return 0;
    }

    std::size_t errors = 0;
    if (report->parsed()) {
      const auto m = load_matrix(data, common, &errors);
      std::vector<std::string> names(patternfeat::kFeatureNames.begin(), patternfeat::kFeatureNames.end());
      fs::create_directories(common.out);
      harness::write_atomic(fs::path(common.out) / "class_summary.json",
                            harness::class_summary_json(m, names).dump(2) + "\n");
      return exit_code(errors, common);
    }

    if (evaluate->parsed() && !model_file.empty()) {
      auto m = load_matrix(data, common, &errors);
      const auto ensemble = learn::ensemble_from_json(nlohmann::json::parse(harness::read_text(model_file)));
      if (!model.impute.empty()) m = learn::impute(m, learn::parse_imputation(model.impute), model.k);
      const auto ev = learn::evaluate(ensemble, m);
      nlohmann::ordered_json j;
      j["model_file"] = fs::path(model_file).filename().string();
      j["evaluation"] = harness::evaluation_json(ev);
      fs::create_directories(common.out);
      harness::write_atomic(fs::path(common.out) / "evaluation.json", j.dump(2) + "\n");
      std::cout << "accuracy " << harness::format_number(ev.accuracy) << " on " << ev.rows << " row(s)\n";
      return exit_code(errors, common);
    }

    const auto cfg = experiment_config(model, train->parsed() ? 1 : reps, common.threads);
    cfg.validate();
    const auto m = load_matrix(data, common, &errors);
    fs::create_directories(common.out);

    if (train->parsed()) {
      m.validate();
      const auto how = cfg.effective_imputation();
      const auto ready = how == learn::Imputation::kNone ? m : learn::impute(m, how, cfg.k);
      auto spec = cfg.params;
      if (cfg.tune) {
        spec = learn::grid_search(ready, learn::default_grid(cfg.model, ready.cols()), cfg.folds, cfg.seed,
                                  cfg.threads)
                   .best;
      }
      Diagnostics diag;
      const auto ensemble =
          learn::train_model(ready, spec, learn::derive_seed(cfg.seed, learn::streams::kModel, 0), &diag);
      for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
      harness::write_atomic(fs::path(common.out) / "model.json", learn::to_json(ensemble).dump(2) + "\n");
      return exit_code(errors, common);
    }

    const auto result = harness::run_experiment(m, cfg);
    harness::write_experiment_reports(common.out, cfg, result, evaluate->parsed(), sis->parsed());
    std::cout << "mean test accuracy " << harness::format_number(result.summary.mean_accuracy) << " over "
              << result.summary.fits << " fit(s)\n";
    if (sis->parsed()) {
      const auto ranked = learn::rank_features(result.sis.score);
      for (std::size_t i = 0; i < std::min<std::size_t>(10, ranked.size()); ++i) {
        std::cout << result.sis.features[ranked[i]] << " " << harness::format_number(result.sis.score[ranked[i]])
                  << "\n";
      }
    }
    return exit_code(errors, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
