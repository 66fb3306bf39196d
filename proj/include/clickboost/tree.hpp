#pragma once

#include <functional>
#include <string>
#include <vector>

#include "clickboost/serial.hpp"
#include "clickboost/types.hpp"

namespace clickboost {

struct TreeConfig {
  int max_depth = 6;
  int min_samples_leaf = 5;
  double min_weight_leaf = 0.0;  // per-side weight mass floor
};

struct TreeNode {
  bool is_leaf = true;
  int feature = -1;
  double threshold = 0.0;
  int left = -1, right = -1;  // indices into Tree::nodes
  double value = 0.0;         // leaf payload
};

/// Binary tree in preorder; nodes[0] is the root. Internal nodes route
/// x[feature] <= threshold to the left child.
struct Tree {
  std::vector<TreeNode> nodes;

  bool empty() const { return nodes.empty(); }
  int depth() const;
  double eval(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

// Per-node feature subset supplier (the random-forest hook); empty means
// all features.
using FeatureSampler = std::function<std::vector<int>(int n_features)>;

// Greedy CART on weighted Gini impurity. Candidate thresholds are midpoints
// between consecutive distinct sorted values; ties break toward the lowest
// feature index, then the lowest threshold. Leaf value is the weighted
// positive-class proportion.
Tree tree_fit(const FeatureMatrix& data, const Vector& weights,
              const TreeConfig& config);

// As tree_fit, over a row multiset (duplicates allowed) with per-position
// weights. Rows index into `data`.
Tree tree_fit_rows(const FeatureMatrix& data, const std::vector<int>& rows,
                   const Vector& row_weights, const TreeConfig& config,
                   const FeatureSampler& sampler = {});

Vector tree_predict_proba(const Tree& tree, const Matrix& x);
// label = 1 iff leaf value >= 0.5
IntVector tree_predict(const Tree& tree, const Matrix& x,
                       Vector* probs = nullptr);

void serialize(serial::Writer& w, const Tree& tree);
Tree deserialize_tree(serial::Reader& r);

}  // namespace clickboost
