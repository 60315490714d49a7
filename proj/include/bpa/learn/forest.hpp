#pragma once

// Random forest of CART classification trees: bootstrap rows, a random feature
// subset at each split, Gini impurity, majority vote.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "bpa/learn/parallel.hpp"
#include "bpa/learn/seeds.hpp"
#include "bpa/learn/tree.hpp"

namespace bpa::learn {

struct ForestParams {
  int n_trees = 200;
  /// 0 = unlimited.
  int max_depth = 0;
  /// Features tried per split; 0 = floor(sqrt(feature count)).
  int features_per_split = 0;
  int min_leaf_size = 1;
  bool bootstrap = true;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

inline void validate(const ForestParams& p) {
  if (p.n_trees < 1 || p.max_depth < 0 || p.features_per_split < 0 || p.min_leaf_size < 1) {
    throw InvalidInput("forest parameters out of range");
  }
}

namespace detail {

inline double gini(std::size_t ones, std::size_t n) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(ones) / static_cast<double>(n);
  return 2.0 * p * (1.0 - p);
}

struct ForestSplit {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

class ForestTreeBuilder {
 public:
  ForestTreeBuilder(const FeatureMatrix& m, const ForestParams& p, int mtry, std::uint64_t seed)
      : m_(m), p_(p), mtry_(mtry), rng_(seed) {}

  Tree build(std::vector<double>& importance) {
    std::vector<std::size_t> rows(m_.rows());
    if (p_.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, m_.rows() - 1);
      for (auto& r : rows) r = pick(rng_);
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    root_size_ = static_cast<double>(rows.size());
    tree_.nodes.clear();
    tree_.nodes.emplace_back();
    grow(0, rows, 0, importance);
    return std::move(tree_);
  }

 private:
  void grow(int node, std::vector<std::size_t>& rows, int depth, std::vector<double>& importance) {
    std::size_t ones = 0;
    for (std::size_t r : rows) ones += static_cast<std::size_t>(m_.labels[r]);
    auto& here = tree_.nodes[static_cast<std::size_t>(node)];
    here.cover = static_cast<double>(rows.size());
    here.leaf = 2 * ones >= rows.size() ? 1.0 : 0.0;

    const bool pure = ones == 0 || ones == rows.size();
    const bool depth_left = p_.max_depth == 0 || depth < p_.max_depth;
    if (pure || !depth_left || rows.size() < 2 * static_cast<std::size_t>(p_.min_leaf_size)) return;

    const ForestSplit best = find_split(rows, ones);
    if (best.feature < 0) return;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    const auto f = static_cast<std::size_t>(best.feature);
    for (std::size_t r : rows) (m_.at(r, f) < best.threshold ? left_rows : right_rows).push_back(r);

    importance[f] += best.decrease * static_cast<double>(rows.size()) / root_size_;
    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes.emplace_back();
    auto& n = tree_.nodes[static_cast<std::size_t>(node)];
    n.feature = best.feature;
    n.threshold = best.threshold;
    n.default_left = true;
    n.left = left;
    n.right = left + 1;
    n.gain = best.decrease;
    rows.clear();
    rows.shrink_to_fit();
    grow(left, left_rows, depth + 1, importance);
    grow(left + 1, right_rows, depth + 1, importance);
  }

  std::vector<std::size_t> sample_features() {
    std::vector<std::size_t> all(m_.cols());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(mtry_), all.size());
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
      std::swap(all[i], all[pick(rng_)]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
  }

  ForestSplit find_split(const std::vector<std::size_t>& rows, std::size_t ones) {
    ForestSplit best;
    const std::size_t n = rows.size();
    const double parent = gini(ones, n);
    const auto min_leaf = static_cast<std::size_t>(p_.min_leaf_size);
    std::vector<std::size_t> order(rows);
    for (std::size_t f : sample_features()) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return m_.at(a, f) < m_.at(b, f); });
      std::size_t left_ones = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_ones += static_cast<std::size_t>(m_.labels[order[i]]);
        const double v = m_.at(order[i], f);
        const double next = m_.at(order[i + 1], f);
        if (!(next > v)) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double child = (static_cast<double>(nl) * gini(left_ones, nl) +
                              static_cast<double>(nr) * gini(ones - left_ones, nr)) /
                             static_cast<double>(n);
        const double decrease = parent - child;
        if (decrease > 1e-12 && decrease > best.decrease) {
          best = {static_cast<int>(f), v + (next - v) / 2.0, decrease};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& m_;
  const ForestParams& p_;
  int mtry_;
  std::mt19937_64 rng_;
  double root_size_ = 1.0;
  Tree tree_;
};

}  // namespace detail

inline int resolve_features_per_split(const ForestParams& p, std::size_t n_features) {
  if (p.features_per_split > 0) return p.features_per_split;
  return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));
}

/// Trees are seeded independently from `seed`, so the forest does not depend
/// on how tree construction is scheduled across `threads`.
inline TreeEnsemble train_forest(const FeatureMatrix& train, const ForestParams& params,
                                 std::uint64_t seed, unsigned threads = 1) {
  validate(params);
  if (train.rows() == 0) throw InvalidInput("train_forest: empty training set");
  if (train.has_missing()) {
    throw InvalidInput("train_forest: training data contains missing values; impute first");
  }

  TreeEnsemble model;
  model.kind = ModelKind::kForest;
  model.feature_names = train.columns;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));
  std::vector<std::vector<double>> per_tree(model.trees.size(), std::vector<double>(train.cols(), 0.0));
  const int mtry = resolve_features_per_split(params, train.cols());
  parallel_for(model.trees.size(), threads, [&](std::size_t t) {
    detail::ForestTreeBuilder builder(train, params, mtry, derive_seed(seed, streams::kTree, t));
    model.trees[t] = builder.build(per_tree[t]);
  });
  model.importance.assign(train.cols(), 0.0);
  for (const auto& imp : per_tree) {
    for (std::size_t f = 0; f < imp.size(); ++f) model.importance[f] += imp[f];
  }
  for (auto& v : model.importance) v /= static_cast<double>(model.trees.size());
  return model;
}

}  // namespace bpa::learn
