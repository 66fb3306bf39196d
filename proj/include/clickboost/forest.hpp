#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clickboost/tree.hpp"

namespace clickboost {

struct ForestConfig {
  int n_trees = 100;
  int m_try = 0;  // features per split; 0 = ceil(sqrt(F))
  bool bootstrap = true;
  TreeConfig tree;
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestConfig config;
};

// Per tree: seeded bootstrap of N rows with replacement, and a fresh draw of
// m_try distinct features at every node of the split search.
ForestModel forest_fit(const FeatureMatrix& data, const ForestConfig& config);

// probability = mean of tree leaf values; label = 1 iff mean >= 0.5
Vector forest_predict_proba(const ForestModel& model, const Matrix& x);
IntVector forest_predict(const ForestModel& model, const Matrix& x,
                         Vector* probs = nullptr);

void serialize(serial::Writer& w, const ForestModel& model);
ForestModel deserialize_forest(serial::Reader& r);

}  // namespace clickboost
