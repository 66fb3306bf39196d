#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "clickboost/lstm.hpp"
#include "clickboost/tree.hpp"

namespace clickboost {

/// AdaBoost sample distribution: nonnegative, sums to 1 (within 1e-12)
/// after every public operation.
using WeightVector = Vector;

// every entry 1/N
WeightVector init_weights(Index n);

// epsilon = total weight mass on misclassified samples
double weighted_error(const IntVector& preds, const IntVector& labels,
                      const WeightVector& weights);

// alpha = 0.5 * ln((1-e)/e) with e clamped into [epsilon_min, 1-epsilon_min]
double learner_weight(double epsilon, double epsilon_min = 1e-10);

// w_i <- w_i * exp(-alpha * y_i * h_i) over {-1,+1} labels, then normalize
WeightVector update_weights(const WeightVector& weights, const IntVector& preds,
                            const IntVector& labels, double alpha);

enum class LearnerKind { lstm, tree };

struct BoostConfig {
  int n_rounds = 5;
  LearnerKind kind = LearnerKind::lstm;
  double epsilon_min = 1e-10;
  std::uint64_t seed = 0;
  // lstm rounds cycle these hidden sizes; per-round seeds derive from `seed`
  std::vector<Index> hidden_sizes = {8, 12, 16};
  LstmTrainConfig lstm;            // template for per-round configs
  TreeConfig tree{2, 5, 0.0};      // shallow trees boost well
};

struct BoostRound {
  double epsilon = 0.0;
  double alpha = 0.0;
  std::variant<LstmModel, Tree> learner;
};

struct EnsembleModel {
  LearnerKind kind = LearnerKind::lstm;
  std::vector<BoostRound> rounds;
  SequenceLayout layout;                  // lstm learners only
  std::uint64_t scaler_fingerprint = 0;   // 0 = no check

  int n_rounds() const { return static_cast<int>(rounds.size()); }
};

// Discrete AdaBoost: train on current weights, stop on epsilon >= 0.5
// (round discarded) or epsilon <= epsilon_min (round kept). Zero recorded
// rounds is a training failure.
EnsembleModel boost_fit(const BoostConfig& config,
                        const FeatureMatrix& trainset);

// {0,1} predictions of a single recorded round
IntVector round_predict(const BoostRound& round, const SequenceLayout& layout,
                        const FeatureMatrix& matrix);

// score(x) = sum_m alpha_m * h_m(x), h in {-1,+1}; label = 1 iff score >= 0.
// Checks the scaler fingerprint when one was recorded at fit time.
Vector ensemble_score(const EnsembleModel& model, const FeatureMatrix& matrix);
IntVector ensemble_predict(const EnsembleModel& model,
                           const FeatureMatrix& matrix);

std::string serialize(const EnsembleModel& model);
EnsembleModel deserialize_ensemble(serial::Reader& r);

}  // namespace clickboost
