#pragma once

// Orchestration of imputation, optional grid search, repeated fits and the
// report files they produce.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bpa/harness/csv.hpp"
#include "bpa/learn/experiment.hpp"
#include "bpa/learn/model_json.hpp"
#include "bpa/patternfeat/summary.hpp"

namespace bpa::harness {

inline constexpr std::size_t kDefaultSisReps = 2000;
inline constexpr std::size_t kFastReps = 50;

struct ExperimentConfig {
  learn::ModelKind model = learn::ModelKind::kBoosted;
  /// Unset means "not chosen"; forest models require an explicit choice.
  std::optional<learn::Imputation> imputation;
  std::size_t k = 10;
  std::size_t reps = kDefaultSisReps;
  std::uint64_t seed = 0;
  learn::ModelSpec params;
  /// Replace `params` by the cross-validated best point of the default grid.
  bool tune = false;
  std::size_t folds = 5;
  unsigned threads = 1;

  /// Rejects inconsistent configurations before any compute happens.
  void validate() const {
    if (reps < 1) throw InvalidInput("config: reps must be at least 1");
    if (params.kind != model) throw InvalidInput("config: parameter set does not match model kind");
    if (model == learn::ModelKind::kForest) {
      if (!imputation || *imputation == learn::Imputation::kNone) {
        throw InvalidInput("config: forest models need --impute knn or --impute zero");
      }
    } else if (imputation && *imputation != learn::Imputation::kNone) {
      throw InvalidInput("config: boosted models handle missing values natively; use --impute none");
    }
    if (imputation == learn::Imputation::kKnn && k < 1) throw InvalidInput("config: k must be positive");
    if (tune && folds < 2) throw InvalidInput("config: folds must be at least 2");
    if (model == learn::ModelKind::kBoosted) {
      learn::validate(params.boosted);
    } else {
      learn::validate(params.forest);
    }
  }

  [[nodiscard]] learn::Imputation effective_imputation() const {
    return imputation.value_or(learn::Imputation::kNone);
  }
};

inline learn::ModelSpec default_params(learn::ModelKind kind) {
  learn::ModelSpec s;
  s.kind = kind;
  return s;
}

struct ExperimentResult {
  learn::ModelSpec params;
  std::optional<learn::GridResult> grid;
  std::vector<learn::FitRecord> fits;
  learn::EvaluationSummary summary;
  learn::SisReport sis;
  bool imputation_applied = false;
};

/// Imputes the full matrix once (forest only), optionally tunes, then runs
/// the repeated fits.
inline ExperimentResult run_experiment(const learn::FeatureMatrix& data, const ExperimentConfig& cfg) {
  cfg.validate();
  data.validate();
  ExperimentResult res;
  const auto how = cfg.effective_imputation();
  const learn::FeatureMatrix m = how == learn::Imputation::kNone ? data : learn::impute(data, how, cfg.k);
  res.imputation_applied = how != learn::Imputation::kNone;
  res.params = cfg.params;
  if (cfg.tune) {
    res.grid = learn::grid_search(m, learn::default_grid(cfg.model, m.cols()), cfg.folds, cfg.seed, cfg.threads);
    res.params = res.grid->best;
  }
  res.fits = learn::repeated_fits(m, res.params, cfg.reps, cfg.seed, cfg.threads);
  res.summary = learn::summarize(res.fits);
  res.sis = learn::sis_from_fits(res.fits, m.columns);
  return res;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json params_json(const learn::ModelSpec& s) {
  nlohmann::ordered_json j;
  j["model"] = learn::to_string(s.kind);
  if (s.kind == learn::ModelKind::kBoosted) {
    j["n_trees"] = s.boosted.n_trees;
    j["max_depth"] = s.boosted.max_depth;
    j["learning_rate"] = s.boosted.learning_rate;
    j["lambda"] = s.boosted.lambda;
    j["min_child_weight"] = s.boosted.min_child_weight;
    j["gamma"] = s.boosted.gamma;
  } else {
    j["n_trees"] = s.forest.n_trees;
    j["max_depth"] = s.forest.max_depth;
    j["features_per_split"] = s.forest.features_per_split;
    j["min_leaf_size"] = s.forest.min_leaf_size;
    j["bootstrap"] = s.forest.bootstrap;
  }
  return j;
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::string subset_key(double d) { return "d_le_" + format_number(d); }

inline nlohmann::ordered_json evaluation_json(const learn::Evaluation& e) {
  nlohmann::ordered_json j;
  j["rows"] = e.rows;
  j["correct"] = e.correct;
  j["accuracy"] = e.accuracy;
  nlohmann::ordered_json subs;
  for (const auto& s : e.subsets) {
    subs[subset_key(s.max_distance_cm)] = {{"rows", s.rows}, {"accuracy", optional_json(s.accuracy)}};
  }
  j["subsets"] = subs;
  return j;
}

inline nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = learn::to_string(cfg.model);
  j["imputation"] = learn::to_string(cfg.effective_imputation());
  if (cfg.effective_imputation() == learn::Imputation::kKnn) j["k"] = cfg.k;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["tune"] = cfg.tune;
  if (cfg.tune) j["folds"] = cfg.folds;
  return j;
}

inline nlohmann::ordered_json evaluation_report_json(const ExperimentConfig& cfg, const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["params"] = params_json(r.params);
  if (r.grid) {
    auto grid = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < r.grid->mean_accuracy.size(); ++g) {
      auto entry = params_json(learn::default_grid(cfg.model, learn::FeatureMatrix::with_registry_columns().cols())[g]);
      entry["cv_accuracy"] = r.grid->mean_accuracy[g];
      grid.push_back(entry);
    }
    j["grid"] = grid;
    j["grid_best_index"] = r.grid->best_index;
  }
  nlohmann::ordered_json summary;
  summary["fits"] = r.summary.fits;
  summary["mean_accuracy"] = r.summary.mean_accuracy;
  summary["mean_train_accuracy"] = r.summary.mean_train_accuracy;
  nlohmann::ordered_json subs;
  for (std::size_t k = 0; k < r.summary.mean_subsets.size(); ++k) {
    const auto& s = r.summary.mean_subsets[k];
    subs[subset_key(s.max_distance_cm)] = {{"mean_accuracy", optional_json(s.accuracy)},
                                           {"fits_with_rows", r.summary.subset_fits[k]}};
  }
  summary["subsets"] = subs;
  j["summary"] = summary;
  auto fits = nlohmann::ordered_json::array();
  for (const auto& f : r.fits) {
    nlohmann::ordered_json fj;
    fj["fit"] = f.index;
    fj["seed"] = f.seed;
    fj["train_rows"] = f.train_rows;
    fj["train_accuracy"] = f.train_accuracy;
    fj["test"] = evaluation_json(f.test);
    fits.push_back(fj);
  }
  j["fits"] = fits;
  return j;
}

inline std::string evaluation_csv(const ExperimentResult& r) {
  CsvRow header{"fit", "seed", "train_rows", "test_rows", "accuracy", "train_accuracy"};
  if (!r.fits.empty()) {
    for (const auto& s : r.fits.front().test.subsets) header.push_back("accuracy_" + subset_key(s.max_distance_cm));
  }
  std::vector<CsvRow> rows;
  for (const auto& f : r.fits) {
    CsvRow row{std::to_string(f.index), std::to_string(f.seed), std::to_string(f.train_rows),
               std::to_string(f.test.rows), format_number(f.test.accuracy), format_number(f.train_accuracy)};
    for (const auto& s : f.test.subsets) row.push_back(format_optional(s.accuracy));
    rows.push_back(std::move(row));
  }
  return to_csv_text(header, rows);
}

inline nlohmann::ordered_json sis_report_json(const ExperimentConfig& cfg, const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["params"] = params_json(r.params);
  j["fits"] = r.sis.fits;
  j["top_k"] = r.sis.top_k;
  auto scores = nlohmann::ordered_json::array();
  for (const std::size_t f : learn::rank_features(r.sis.score)) {
    scores.push_back({{"feature", r.sis.features[f]}, {"sis", r.sis.score[f]}, {"hits", r.sis.hits[f]}});
  }
  j["scores"] = scores;
  return j;
}

/// Features in descending SIS order (column order on ties).
inline std::string sis_csv(const learn::SisReport& s) {
  std::vector<CsvRow> rows;
  for (const std::size_t f : learn::rank_features(s.score)) {
    rows.push_back({s.features[f], format_number(s.score[f]), std::to_string(s.hits[f]), std::to_string(s.fits)});
  }
  return to_csv_text({"feature", "sis", "hits", "fits"}, rows);
}

/// Writes evaluation.json/.csv and/or sis.json/.csv into `dir`.
inline std::vector<std::filesystem::path> write_experiment_reports(const std::filesystem::path& dir,
                                                                   const ExperimentConfig& cfg,
                                                                   const ExperimentResult& r, bool evaluation,
                                                                   bool sis) {
  std::vector<std::filesystem::path> written;
  if (evaluation) {
    write_atomic(dir / "evaluation.json", evaluation_report_json(cfg, r).dump(2) + "\n");
    write_atomic(dir / "evaluation.csv", evaluation_csv(r));
    written.push_back(dir / "evaluation.json");
    written.push_back(dir / "evaluation.csv");
  }
  if (sis) {
    write_atomic(dir / "sis.json", sis_report_json(cfg, r).dump(2) + "\n");
    write_atomic(dir / "sis.csv", sis_csv(r.sis));
    written.push_back(dir / "sis.json");
    written.push_back(dir / "sis.csv");
  }
  return written;
}

inline nlohmann::ordered_json box_json(const patternfeat::BoxSummary& b) {
  nlohmann::ordered_json j;
  j["count"] = b.count;
  j["missing"] = b.missing;
  j["empty"] = !b.has_data;
  if (b.has_data) {
    j["min"] = b.min;
    j["q1"] = b.q1;
    j["median"] = b.median;
    j["q3"] = b.q3;
    j["max"] = b.max;
    j["whisker_low"] = b.whisker_low;
    j["whisker_high"] = b.whisker_high;
    j["outliers"] = b.outliers;
  }
  return j;
}

/// Boxplot data per feature and class ("gunshot" / "impact").
inline nlohmann::ordered_json class_summary_json(const learn::FeatureMatrix& m,
                                                 const std::vector<std::string>& features) {
  nlohmann::ordered_json j;
  for (const auto& name : features) {
    const auto col = patternfeat::feature_id(name);
    std::vector<patternfeat::FeatureValue> by_class[2];
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double v = m.at(r, col);
      by_class[m.labels[r]].push_back(learn::is_missing(v) ? std::nullopt : std::optional<double>(v));
    }
    nlohmann::ordered_json fj;
    fj["gunshot"] = box_json(patternfeat::box_summary(by_class[1]));
    fj["impact"] = box_json(patternfeat::box_summary(by_class[0]));
    j[name] = fj;
  }
  return j;
}

}  // namespace bpa::harness
