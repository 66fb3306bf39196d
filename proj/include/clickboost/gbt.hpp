#pragma once

#include <string>
#include <vector>

#include "clickboost/tree.hpp"

namespace clickboost {

struct GbtConfig {
  int n_rounds = 100;
  double eta = 0.1;     // shrinkage, in (0, 1]
  double lambda = 1.0;  // L2 leaf regularizer, >= 0
  double gamma = 0.0;   // split penalty, >= 0
  TreeConfig tree;      // min_weight_leaf acts on the hessian mass
};

/// Boosted ensemble of score trees: prediction is
/// sigmoid(base_score + eta * sum of tree scores).
struct GbtModel {
  std::vector<Tree> trees;
  double base_score = 0.0;  // initial log-odds
  GbtConfig config;
};

// One regression tree on (gradient, hessian) statistics. Split gain is
//   0.5 * [G_L^2/(H_L+l) + G_R^2/(H_R+l) - (G_L+G_R)^2/(H_L+H_R+l)] - gamma,
// only strictly positive gains split; leaf weight is -G/(H+l).
Tree gbt_grow_tree(const Matrix& x, const Vector& grad, const Vector& hess,
                   const GbtConfig& config);

GbtModel gbt_fit(const FeatureMatrix& data, const GbtConfig& config);

Vector gbt_margin(const GbtModel& model, const Matrix& x);
Vector gbt_predict_proba(const GbtModel& model, const Matrix& x);
IntVector gbt_predict(const GbtModel& model, const Matrix& x,
                      Vector* probs = nullptr);

void serialize(serial::Writer& w, const GbtModel& model);
GbtModel deserialize_gbt(serial::Reader& r);

}  // namespace clickboost
