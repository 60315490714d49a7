#pragma once

// JSON model format:
//
//   {
//     "format": "bpa-tree-ensemble", "version": 1,
//     "kind": "boosted" | "forest",
//     "base_score": 0.0, "learning_rate": 0.3,
//     "features": ["num_stains", ...],
//     "importance": [...],
//     "trees": [ <node>, ... ]
//   }
//
// An internal node is
//   {"feature": <column index>, "feature_name": "...", "threshold": t,
//    "default": "left" | "right", "gain": g, "cover": c,
//    "left": <node>, "right": <node>}
// and a leaf is {"leaf": v, "cover": c}. Rows with value < threshold go left;
// missing values follow "default". Boosted leaves are raw scores that already
// include the learning rate; forest leaves are the predicted class (0 or 1).

#include "json.hpp"

#include "bpa/learn/tree.hpp"

namespace bpa::learn {

namespace detail {

inline nlohmann::ordered_json node_to_json(const Tree& t, int i, const std::vector<std::string>& names) {
  const auto& n = t.nodes[static_cast<std::size_t>(i)];
  nlohmann::ordered_json j;
  if (n.is_leaf()) {
    j["leaf"] = n.leaf;
    j["cover"] = n.cover;
    return j;
  }
  j["feature"] = n.feature;
  j["feature_name"] = names.at(static_cast<std::size_t>(n.feature));
  j["threshold"] = n.threshold;
  j["default"] = n.default_left ? "left" : "right";
  j["gain"] = n.gain;
  j["cover"] = n.cover;
  j["left"] = node_to_json(t, n.left, names);
  j["right"] = node_to_json(t, n.right, names);
  return j;
}

inline int node_from_json(const nlohmann::json& j, Tree& t, std::size_t n_features) {
  const int index = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  TreeNode n;
  n.cover = j.value("cover", 0.0);
  if (j.contains("leaf")) {
    n.leaf = j.at("leaf").get<double>();
    if (!std::isfinite(n.leaf)) throw InvalidInput("model json: non-finite leaf score");
    t.nodes[static_cast<std::size_t>(index)] = n;
    return index;
  }
  n.feature = j.at("feature").get<int>();
  if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= n_features) {
    throw InvalidInput("model json: feature index out of range");
  }
  n.threshold = j.at("threshold").get<double>();
  const auto dir = j.at("default").get<std::string>();
  if (dir != "left" && dir != "right") throw InvalidInput("model json: default must be left or right");
  n.default_left = dir == "left";
  n.gain = j.value("gain", 0.0);
  n.left = node_from_json(j.at("left"), t, n_features);
  n.right = node_from_json(j.at("right"), t, n_features);
  t.nodes[static_cast<std::size_t>(index)] = n;
  return index;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const TreeEnsemble& model) {
  nlohmann::ordered_json j;
  j["format"] = "bpa-tree-ensemble";
  j["version"] = 1;
  j["kind"] = to_string(model.kind);
  j["base_score"] = model.base_score;
  j["learning_rate"] = model.learning_rate;
  j["features"] = model.feature_names;
  j["importance"] = model.importance;
  auto trees = nlohmann::ordered_json::array();
  for (const auto& t : model.trees) trees.push_back(detail::node_to_json(t, 0, model.feature_names));
  j["trees"] = std::move(trees);
  return j;
}

inline TreeEnsemble ensemble_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "bpa-tree-ensemble") throw InvalidInput("model json: unknown format");
  TreeEnsemble m;
  m.kind = parse_model_kind(j.at("kind").get<std::string>());
  m.base_score = j.at("base_score").get<double>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.feature_names = j.at("features").get<std::vector<std::string>>();
  m.importance = j.at("importance").get<std::vector<double>>();
  if (m.importance.size() != m.feature_names.size()) throw InvalidInput("model json: importance length mismatch");
  for (const auto& tj : j.at("trees")) {
    Tree t;
    detail::node_from_json(tj, t, m.feature_names.size());
    m.trees.push_back(std::move(t));
  }
  return m;
}

}  // namespace bpa::learn
