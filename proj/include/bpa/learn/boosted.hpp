#pragma once

// Second-order gradient boosting of regression trees under logistic loss,
// with sparsity-aware split finding: every candidate split also learns which
// side rows with a missing value should follow.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bpa/diagnostics.hpp"
#include "bpa/learn/tree.hpp"

namespace bpa::learn {

struct BoostedParams {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.3;
  /// L2 penalty on leaf weights.
  double lambda = 1.0;
  double min_child_weight = 1.0;
  /// Minimum loss reduction for a split.
  double gamma = 0.0;

  friend bool operator==(const BoostedParams&, const BoostedParams&) = default;
};

namespace detail {

struct GradStats {
  double g = 0.0;
  double h = 0.0;
  void add(double gi, double hi) {
    g += gi;
    h += hi;
  }
};

inline double leaf_objective(const GradStats& s, double lambda) { return s.g * s.g / (s.h + lambda); }

struct BoostSplit {
  int feature = -1;
  double threshold = 0.0;
  bool default_left = false;
  double gain = 0.0;
};

class BoostedTreeBuilder {
 public:
  BoostedTreeBuilder(const FeatureMatrix& m, const std::vector<std::vector<std::size_t>>& sorted,
                     const BoostedParams& p, const std::vector<double>& grad,
                     const std::vector<double>& hess)
      : m_(m), sorted_(sorted), p_(p), grad_(grad), hess_(hess), node_of_(m.rows(), 0) {}

  Tree build(std::vector<double>& importance) {
    tree_.nodes.clear();
    tree_.nodes.emplace_back();
    std::fill(node_of_.begin(), node_of_.end(), 0);
    grow(0, 0, importance);
    return std::move(tree_);
  }

 private:
  void grow(int node, int depth, std::vector<double>& importance) {
    GradStats total;
    for (std::size_t r = 0; r < m_.rows(); ++r) {
      if (node_of_[r] == node) total.add(grad_[r], hess_[r]);
    }
    tree_.nodes[static_cast<std::size_t>(node)].cover = total.h;

    BoostSplit best;
    if (depth < p_.max_depth) best = find_split(node, total);
    if (best.feature < 0) {
      tree_.nodes[static_cast<std::size_t>(node)].leaf = -total.g / (total.h + p_.lambda) * p_.learning_rate;
      return;
    }

    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes.emplace_back();
    auto& n = tree_.nodes[static_cast<std::size_t>(node)];
    n.feature = best.feature;
    n.threshold = best.threshold;
    n.default_left = best.default_left;
    n.left = left;
    n.right = left + 1;
    n.gain = best.gain;
    importance[static_cast<std::size_t>(best.feature)] += best.gain;

    const auto f = static_cast<std::size_t>(best.feature);
    for (std::size_t r = 0; r < m_.rows(); ++r) {
      if (node_of_[r] != node) continue;
      const double v = m_.at(r, f);
      const bool go_left = is_missing(v) ? best.default_left : v < best.threshold;
      node_of_[r] = go_left ? left : left + 1;
    }
    grow(left, depth + 1, importance);
    grow(left + 1, depth + 1, importance);
  }

  BoostSplit find_split(int node, const GradStats& total) const {
    BoostSplit best;
    const double parent = leaf_objective(total, p_.lambda);
    for (std::size_t f = 0; f < m_.cols(); ++f) {
      GradStats present;
      for (std::size_t r : sorted_[f]) {
        if (node_of_[r] == node) present.add(grad_[r], hess_[r]);
      }
      const GradStats missing{total.g - present.g, total.h - present.h};

      GradStats left;
      double prev = 0.0;
      bool have_prev = false;
      for (std::size_t r : sorted_[f]) {
        if (node_of_[r] != node) continue;
        const double v = m_.at(r, f);
        if (have_prev && v > prev) {
          const double threshold = prev + (v - prev) / 2.0;
          // Missing rows to the right, then to the left; ties keep the first.
          consider(best, static_cast<int>(f), threshold, false, left,
                   GradStats{total.g - left.g, total.h - left.h}, parent);
          consider(best, static_cast<int>(f), threshold, true,
                   GradStats{left.g + missing.g, left.h + missing.h},
                   GradStats{present.g - left.g, present.h - left.h}, parent);
        }
        left.add(grad_[r], hess_[r]);
        prev = v;
        have_prev = true;
      }
    }
    return best;
  }

  void consider(BoostSplit& best, int feature, double threshold, bool default_left,
                const GradStats& l, const GradStats& r, double parent) const {
    if (l.h < p_.min_child_weight || r.h < p_.min_child_weight) return;
    const double gain =
        0.5 * (leaf_objective(l, p_.lambda) + leaf_objective(r, p_.lambda) - parent) - p_.gamma;
    constexpr double kMinGain = 1e-12;
    if (gain > kMinGain && gain > best.gain) {
      best = {feature, threshold, default_left, gain};
    }
  }

  const FeatureMatrix& m_;
  const std::vector<std::vector<std::size_t>>& sorted_;
  const BoostedParams& p_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  std::vector<int> node_of_;
  Tree tree_;
};

/// Per feature, the rows with an observed value in ascending value order
/// (row index breaks ties).
inline std::vector<std::vector<std::size_t>> presort_columns(const FeatureMatrix& m) {
  std::vector<std::vector<std::size_t>> sorted(m.cols());
  for (std::size_t f = 0; f < m.cols(); ++f) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!is_missing(m.at(r, f))) sorted[f].push_back(r);
    }
    std::stable_sort(sorted[f].begin(), sorted[f].end(),
                     [&](std::size_t a, std::size_t b) { return m.at(a, f) < m.at(b, f); });
  }
  return sorted;
}

}  // namespace detail

inline void validate(const BoostedParams& p) {
  if (p.n_trees < 1 || p.max_depth < 0 || !(p.learning_rate > 0.0) || p.lambda < 0.0 ||
      p.min_child_weight < 0.0 || p.gamma < 0.0) {
    throw InvalidInput("boosted parameters out of range");
  }
}

inline TreeEnsemble train_boosted(const FeatureMatrix& train, const BoostedParams& params,
                                  Diagnostics* diag = nullptr) {
  validate(params);
  if (train.rows() == 0) throw InvalidInput("train_boosted: empty training set");

  TreeEnsemble model;
  model.kind = ModelKind::kBoosted;
  model.feature_names = train.columns;
  model.base_score = 0.0;
  model.learning_rate = params.learning_rate;
  model.importance.assign(train.cols(), 0.0);

  const std::size_t n = train.rows();
  const auto positives = static_cast<std::size_t>(std::count(train.labels.begin(), train.labels.end(), 1));
  const bool single_class = positives == 0 || positives == n;
  if (single_class) warn(diag, "train_boosted: training data contains a single class");

  BoostedParams effective = params;
  if (single_class) effective.max_depth = 0;

  const auto sorted = detail::presort_columns(train);
  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  for (int t = 0; t < effective.n_trees; ++t) {
    for (std::size_t r = 0; r < n; ++r) {
      const double p = sigmoid(margin[r]);
      grad[r] = p - train.labels[r];
      hess[r] = std::max(p * (1.0 - p), 1e-16);
    }
    detail::BoostedTreeBuilder builder(train, sorted, effective, grad, hess);
    Tree tree = builder.build(model.importance);
    for (std::size_t r = 0; r < n; ++r) margin[r] += tree.predict(train.row(r));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace bpa::learn
