#pragma once

// Tree and ensemble representation shared by the boosted and forest learners.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bpa/learn/matrix.hpp"

namespace bpa::learn {

/// Node of a binary decision tree stored in a flat array; children index into
/// the same array. Rows with value < threshold go left, missing values follow
/// `default_left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  bool default_left = false;
  int left = -1;
  int right = -1;
  /// Raw score (boosted) or class 0/1 (forest) when this node is a leaf.
  double leaf = 0.0;
  /// Training rows (boosted: hessian sum) reaching this node, kept for export.
  double cover = 0.0;
  double gain = 0.0;

  [[nodiscard]] bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  /// Index of the leaf reached by `x`.
  [[nodiscard]] int leaf_index(std::span<const double> x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      const double v = x[static_cast<std::size_t>(n.feature)];
      if (is_missing(v)) {
        i = n.default_left ? n.left : n.right;
      } else {
        i = v < n.threshold ? n.left : n.right;
      }
    }
    return i;
  }

  [[nodiscard]] double predict(std::span<const double> x) const {
    return nodes[static_cast<std::size_t>(leaf_index(x))].leaf;
  }

  [[nodiscard]] int depth() const { return depth_from(0); }

 private:
  [[nodiscard]] int depth_from(int i) const {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_from(n.left), depth_from(n.right));
  }
};

enum class ModelKind { kBoosted, kForest };

inline const char* to_string(ModelKind k) { return k == ModelKind::kBoosted ? "boosted" : "forest"; }

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "boosted") return ModelKind::kBoosted;
  if (s == "forest") return ModelKind::kForest;
  throw InvalidInput("model must be 'boosted' or 'forest', got '" + s + "'");
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Trained ensemble. Boosted leaves already include the learning-rate
/// shrinkage, so the raw score is base_score + sum of reached leaves.
struct TreeEnsemble {
  ModelKind kind = ModelKind::kBoosted;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;
  double base_score = 0.0;
  double learning_rate = 0.0;
  /// Boosted: total split gain per feature. Forest: mean impurity decrease.
  std::vector<double> importance;

  [[nodiscard]] double raw_score(std::span<const double> x) const {
    double s = base_score;
    for (const auto& t : trees) s += t.predict(x);
    return s;
  }

  /// Boosted: sigmoid of the raw score. Forest: fraction of trees voting 1.
  [[nodiscard]] double predict_proba(std::span<const double> x) const {
    if (kind == ModelKind::kBoosted) return sigmoid(raw_score(x));
    if (trees.empty()) return 0.0;
    return static_cast<double>(votes(x)) / static_cast<double>(trees.size());
  }

  [[nodiscard]] std::size_t votes(std::span<const double> x) const {
    std::size_t ones = 0;
    for (const auto& t : trees) {
      if (t.predict(x) > 0.5) ++ones;
    }
    return ones;
  }

  /// Boosted: probability > 0.5. Forest: majority vote, ties to class 1.
  [[nodiscard]] int predict(std::span<const double> x) const {
    if (kind == ModelKind::kBoosted) return predict_proba(x) > 0.5 ? 1 : 0;
    return 2 * votes(x) >= trees.size() ? 1 : 0;
  }

  [[nodiscard]] std::vector<int> predict_all(const FeatureMatrix& m) const {
    if (m.cols() != feature_names.size()) throw InvalidInput("predict: column count differs from model");
    std::vector<int> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r] = predict(m.row(r));
    return out;
  }
};

}  // namespace bpa::learn
