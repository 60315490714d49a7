#pragma once

// Train/test splitting, distance-stratified evaluation, grid search and the
// Stability Importance Score (how often a feature ranks in the top 10 by
// importance across repeated fits).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "bpa/learn/boosted.hpp"
#include "bpa/learn/forest.hpp"
#include "bpa/learn/impute.hpp"
#include "bpa/learn/parallel.hpp"
#include "bpa/learn/seeds.hpp"

namespace bpa::learn {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Uniform random partition: ceil(fraction * n) training rows, the rest test.
/// Both index lists are returned in ascending order.
inline Split split_train_test(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidInput("split: fraction must lie in (0,1)");
  if (n < 4) throw InvalidInput("split: need at least 4 rows");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(idx[i], idx[pick(rng)]);
  }
  const auto n_train = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

inline constexpr double kTrainFraction = 0.75;
inline constexpr std::array<double, 3> kDistanceThresholdsCm = {30.0, 60.0, 120.0};

struct SubsetAccuracy {
  double max_distance_cm = 0.0;
  std::size_t rows = 0;
  /// nullopt when no test row falls in the subset.
  std::optional<double> accuracy;
};

struct Evaluation {
  std::size_t rows = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::vector<SubsetAccuracy> subsets;
};

inline Evaluation evaluate_predictions(const std::vector<int>& predicted, const FeatureMatrix& test,
                                       std::span<const double> thresholds = kDistanceThresholdsCm) {
  if (predicted.size() != test.rows()) throw InvalidInput("evaluate: prediction count mismatch");
  Evaluation e;
  e.rows = test.rows();
  for (std::size_t r = 0; r < test.rows(); ++r) e.correct += predicted[r] == test.labels[r] ? 1 : 0;
  e.accuracy = e.rows == 0 ? 0.0 : static_cast<double>(e.correct) / static_cast<double>(e.rows);
  for (double d : thresholds) {
    SubsetAccuracy s;
    s.max_distance_cm = d;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < test.rows(); ++r) {
      if (!(test.bt_distance_cm[r] <= d)) continue;
      ++s.rows;
      ok += predicted[r] == test.labels[r] ? 1 : 0;
    }
    if (s.rows > 0) s.accuracy = static_cast<double>(ok) / static_cast<double>(s.rows);
    e.subsets.push_back(s);
  }
  return e;
}

inline Evaluation evaluate(const TreeEnsemble& model, const FeatureMatrix& test,
                           std::span<const double> thresholds = kDistanceThresholdsCm) {
  return evaluate_predictions(model.predict_all(test), test, thresholds);
}

/// Model family plus the hyper-parameters of that family.
struct ModelSpec {
  ModelKind kind = ModelKind::kBoosted;
  BoostedParams boosted;
  ForestParams forest;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
    if (a.kind != b.kind) return false;
    return a.kind == ModelKind::kBoosted ? a.boosted == b.boosted : a.forest == b.forest;
  }
};

inline TreeEnsemble train_model(const FeatureMatrix& train, const ModelSpec& spec, std::uint64_t seed,
                                Diagnostics* diag = nullptr) {
  if (spec.kind == ModelKind::kBoosted) return train_boosted(train, spec.boosted, diag);
  return train_forest(train, spec.forest, seed);
}

/// Boosted: trees {50,100,200} x depth {2,3,4} x learning rate {0.1,0.3}, L2 1.
/// Forest: trees {100,200} x depth {4, unlimited} x features-per-split {sqrt(p), p/3}.
inline std::vector<ModelSpec> default_grid(ModelKind kind, std::size_t n_features) {
  std::vector<ModelSpec> grid;
  if (kind == ModelKind::kBoosted) {
    for (int trees : {50, 100, 200}) {
      for (int depth : {2, 3, 4}) {
        for (double lr : {0.1, 0.3}) {
          ModelSpec s;
          s.kind = kind;
          s.boosted.n_trees = trees;
          s.boosted.max_depth = depth;
          s.boosted.learning_rate = lr;
          s.boosted.lambda = 1.0;
          grid.push_back(s);
        }
      }
    }
  } else {
    const int third = std::max(1, static_cast<int>(n_features / 3));
    for (int trees : {100, 200}) {
      for (int depth : {4, 0}) {
        for (int mtry : {0, third}) {
          ModelSpec s;
          s.kind = kind;
          s.forest.n_trees = trees;
          s.forest.max_depth = depth;
          s.forest.features_per_split = mtry;
          grid.push_back(s);
        }
      }
    }
  }
  return grid;
}

struct GridResult {
  ModelSpec best;
  std::size_t best_index = 0;
  std::vector<double> mean_accuracy;
};

/// Exhaustive k-fold cross-validated search; the first grid point with the
/// highest mean accuracy wins.
inline GridResult grid_search(const FeatureMatrix& m, const std::vector<ModelSpec>& grid,
                              std::size_t folds, std::uint64_t seed, unsigned threads = 1) {
  if (grid.empty()) throw InvalidInput("grid_search: empty grid");
  if (folds < 2 || folds > m.rows()) throw InvalidInput("grid_search: folds must lie in [2, rows]");

  std::vector<std::size_t> order(m.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, streams::kFolds, 0));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<FeatureMatrix> train_sets;
  std::vector<FeatureMatrix> test_sets;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> tr;
    std::vector<std::size_t> te;
    for (std::size_t i = 0; i < order.size(); ++i) (i % folds == f ? te : tr).push_back(order[i]);
    std::sort(tr.begin(), tr.end());
    std::sort(te.begin(), te.end());
    train_sets.push_back(m.subset(tr));
    test_sets.push_back(m.subset(te));
  }

  GridResult result;
  result.mean_accuracy.assign(grid.size(), 0.0);
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    double sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      const auto model = train_model(train_sets[f], grid[g], derive_seed(seed, streams::kModel, f));
      sum += evaluate(model, test_sets[f]).accuracy;
    }
    result.mean_accuracy[g] = sum / static_cast<double>(folds);
  });
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (result.mean_accuracy[g] > result.mean_accuracy[result.best_index]) result.best_index = g;
  }
  result.best = grid[result.best_index];
  return result;
}

/// Feature indices ordered by descending importance; equal importances keep
/// column order.
inline std::vector<std::size_t> rank_features(const std::vector<double>& importance) {
  std::vector<std::size_t> idx(importance.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
  return idx;
}

inline constexpr std::size_t kSisTopK = 10;

struct FitRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t train_rows = 0;
  Evaluation test;
  double train_accuracy = 0.0;
  std::vector<double> importance;
};

/// R independent split/train/evaluate rounds. Fit i uses seeds derived from
/// (root_seed, i) only, and results are stored by fit index.
inline std::vector<FitRecord> repeated_fits(const FeatureMatrix& m, const ModelSpec& spec, std::size_t reps,
                                            std::uint64_t root_seed, unsigned threads = 1) {
  if (reps < 1) throw InvalidInput("repeated fits: need at least one repetition");
  if (spec.kind == ModelKind::kForest && m.has_missing()) {
    throw InvalidInput("forest model requires imputed data (missing values present)");
  }
  std::vector<FitRecord> records(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    const std::uint64_t fit_seed = derive_seed(root_seed, streams::kFit, i);
    const auto split = split_train_test(m.rows(), kTrainFraction, derive_seed(fit_seed, streams::kSplit, 0));
    const FeatureMatrix train = m.subset(split.train);
    const FeatureMatrix test = m.subset(split.test);
    const TreeEnsemble model = train_model(train, spec, derive_seed(fit_seed, streams::kModel, 0));
    FitRecord& rec = records[i];
    rec.index = i;
    rec.seed = fit_seed;
    rec.train_rows = train.rows();
    rec.test = evaluate(model, test);
    rec.train_accuracy = evaluate(model, train).accuracy;
    rec.importance = model.importance;
  });
  return records;
}

struct SisReport {
  std::vector<std::string> features;
  /// Fraction of fits in which each feature ranked in the top k.
  std::vector<double> score;
  std::vector<std::size_t> hits;
  std::size_t fits = 0;
  std::size_t top_k = kSisTopK;
};

inline SisReport sis_from_importances(const std::vector<std::vector<double>>& importances,
                                      const std::vector<std::string>& features,
                                      std::size_t top_k = kSisTopK) {
  if (importances.empty()) throw InvalidInput("sis: no fits");
  SisReport rep;
  rep.features = features;
  rep.fits = importances.size();
  rep.top_k = top_k;
  rep.hits.assign(features.size(), 0);
  for (const auto& imp : importances) {
    if (imp.size() != features.size()) throw InvalidInput("sis: importance length mismatch");
    const auto ranked = rank_features(imp);
    for (std::size_t k = 0; k < std::min(top_k, ranked.size()); ++k) ++rep.hits[ranked[k]];
  }
  rep.score.resize(features.size());
  for (std::size_t f = 0; f < features.size(); ++f) {
    rep.score[f] = static_cast<double>(rep.hits[f]) / static_cast<double>(rep.fits);
  }
  return rep;
}

inline SisReport sis_from_fits(const std::vector<FitRecord>& fits, const std::vector<std::string>& features) {
  std::vector<std::vector<double>> imps;
  imps.reserve(fits.size());
  for (const auto& f : fits) imps.push_back(f.importance);
  return sis_from_importances(imps, features);
}

inline SisReport sis(const FeatureMatrix& m, const ModelSpec& spec, std::size_t reps, std::uint64_t seed,
                     unsigned threads = 1) {
  if (m.cols() < kSisTopK) throw InvalidInput("sis: need at least 10 features");
  return sis_from_fits(repeated_fits(m, spec, reps, seed, threads), m.columns);
}

struct EvaluationSummary {
  std::size_t fits = 0;
  double mean_accuracy = 0.0;
  double mean_train_accuracy = 0.0;
  /// Mean over fits where the subset was non-empty, with that fit count.
  std::vector<SubsetAccuracy> mean_subsets;
  std::vector<std::size_t> subset_fits;
};

inline EvaluationSummary summarize(const std::vector<FitRecord>& fits) {
  EvaluationSummary s;
  s.fits = fits.size();
  if (fits.empty()) return s;
  const std::size_t n_sub = fits.front().test.subsets.size();
  s.mean_subsets.resize(n_sub);
  s.subset_fits.assign(n_sub, 0);
  std::vector<double> sums(n_sub, 0.0);
  for (const auto& f : fits) {
    s.mean_accuracy += f.test.accuracy;
    s.mean_train_accuracy += f.train_accuracy;
    for (std::size_t k = 0; k < n_sub; ++k) {
      const auto& sub = f.test.subsets[k];
      s.mean_subsets[k].max_distance_cm = sub.max_distance_cm;
      s.mean_subsets[k].rows += sub.rows;
      if (sub.accuracy) {
        sums[k] += *sub.accuracy;
        ++s.subset_fits[k];
      }
    }
  }
  s.mean_accuracy /= static_cast<double>(fits.size());
  s.mean_train_accuracy /= static_cast<double>(fits.size());
  for (std::size_t k = 0; k < n_sub; ++k) {
    if (s.subset_fits[k] > 0) s.mean_subsets[k].accuracy = sums[k] / static_cast<double>(s.subset_fits[k]);
  }
  return s;
}

}  // namespace bpa::learn
