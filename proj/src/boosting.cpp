#include "clickboost/boosting.hpp"

#include <cmath>

#include "clickboost/errors.hpp"
#include "clickboost/rng.hpp"

namespace clickboost {
namespace {

void check_binary(const IntVector& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i)
    if (v(i) != 0 && v(i) != 1)
      throw DataError(std::string(what) + " contains a value outside {0,1}");
}

}  // namespace

WeightVector init_weights(Index n) {
  if (n < 1) throw DataError("init_weights: N must be >= 1");
  WeightVector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  w /= w.sum();
  return w;
}

double weighted_error(const IntVector& preds, const IntVector& labels,
                      const WeightVector& weights) {
  if (preds.size() != labels.size() || weights.size() != labels.size())
    throw DataError("weighted_error: length mismatch");
  check_binary(preds, "weighted_error: preds");
  check_binary(labels, "weighted_error: labels");
  double epsilon = 0.0;
  for (Index i = 0; i < preds.size(); ++i)
    if (preds(i) != labels(i)) epsilon += weights(i);
  return epsilon;
}

double learner_weight(double epsilon, double epsilon_min) {
  const double e =
      std::min(std::max(epsilon, epsilon_min), 1.0 - epsilon_min);
  return 0.5 * std::log((1.0 - e) / e);
}

WeightVector update_weights(const WeightVector& weights, const IntVector& preds,
                            const IntVector& labels, double alpha) {
  if (preds.size() != labels.size() || weights.size() != labels.size())
    throw DataError("update_weights: length mismatch");
  if (!std::isfinite(alpha))
    throw DataError("update_weights: alpha must be finite");
  WeightVector w = weights;
  for (Index i = 0; i < w.size(); ++i) {
    // y*h = +1 when the prediction agrees, -1 otherwise
    w(i) *= std::exp(preds(i) == labels(i) ? -alpha : alpha);
  }
  const double total = w.sum();
  if (!(total > 0.0))
    throw DataError("update_weights: weight mass vanished");
  w /= total;
  return w;
}

IntVector round_predict(const BoostRound& round, const SequenceLayout& layout,
                        const FeatureMatrix& matrix) {
  if (const LstmModel* lstm = std::get_if<LstmModel>(&round.learner))
    return predict(lstm->params, matrix, layout);
  return tree_predict(std::get<Tree>(round.learner), matrix.values);
}

EnsembleModel boost_fit(const BoostConfig& config,
                        const FeatureMatrix& trainset) {
  if (config.n_rounds < 1) throw DataError("boost_fit: n_rounds must be >= 1");
  if (config.kind == LearnerKind::lstm && config.hidden_sizes.empty())
    throw DataError("boost_fit: hidden_sizes must be nonempty");
  const Index n = trainset.rows();

  EnsembleModel model;
  model.kind = config.kind;
  model.layout = SequenceLayout::for_features(trainset.cols());
  model.scaler_fingerprint =
      trainset.scaler ? trainset.scaler->fingerprint() : 0;

  WeightVector w = init_weights(n);
  for (int m = 0; m < config.n_rounds; ++m) {
    BoostRound round;
    IntVector preds;
    if (config.kind == LearnerKind::lstm) {
      LstmTrainConfig round_config = config.lstm;
      round_config.hidden_size =
          config.hidden_sizes[static_cast<std::size_t>(m) %
                              config.hidden_sizes.size()];
      round_config.seed =
          seed_for(config.seed, "round", static_cast<std::uint64_t>(m));
      LstmModel learner;
      learner.config = round_config;
      learner.layout = model.layout;
      learner.params = train(round_config, trainset, w);
      preds = predict(learner.params, trainset, model.layout);
      round.learner = std::move(learner);
    } else {
      Tree tree = tree_fit(trainset, w, config.tree);
      preds = tree_predict(tree, trainset.values);
      round.learner = std::move(tree);
    }

    round.epsilon = weighted_error(preds, trainset.labels, w);
    if (round.epsilon >= 0.5) break;  // discard this round and stop
    round.alpha = learner_weight(round.epsilon, config.epsilon_min);
    model.rounds.push_back(std::move(round));
    if (model.rounds.back().epsilon <= config.epsilon_min) break;
    w = update_weights(w, preds, trainset.labels, model.rounds.back().alpha);
  }

  if (model.rounds.empty())
    throw TrainError(
        "boost_fit: no rounds recorded; the first weak learner had weighted "
        "error >= 0.5");
  return model;
}

Vector ensemble_score(const EnsembleModel& model, const FeatureMatrix& matrix) {
  if (model.rounds.empty()) throw DataError("ensemble: untrained model");
  if (model.scaler_fingerprint != 0) {
    if (!matrix.scaler)
      throw FingerprintError(
          "ensemble: model was trained on standardized features but the "
          "input has no scaler");
    if (matrix.scaler->fingerprint() != model.scaler_fingerprint)
      throw FingerprintError(
          "ensemble: scaler fingerprint mismatch between training and "
          "prediction inputs");
  }
  Vector score = Vector::Zero(matrix.rows());
  for (const BoostRound& round : model.rounds) {
    const IntVector preds = round_predict(round, model.layout, matrix);
    for (Index i = 0; i < score.size(); ++i)
      score(i) += round.alpha * (preds(i) == 1 ? 1.0 : -1.0);
  }
  return score;
}

IntVector ensemble_predict(const EnsembleModel& model,
                           const FeatureMatrix& matrix) {
  const Vector score = ensemble_score(model, matrix);
  IntVector labels(score.size());
  for (Index i = 0; i < score.size(); ++i)
    labels(i) = score(i) >= 0.0 ? 1 : 0;  // ties go to the positive class
  return labels;
}

std::string serialize(const EnsembleModel& model) {
  serial::Writer w;
  w.tok("ensemble").tok("v1").endl();
  w.tok("kind")
      .tok(model.kind == LearnerKind::lstm ? "lstm" : "tree")
      .tok("rounds")
      .num(static_cast<std::int64_t>(model.rounds.size()))
      .tok("scaler_fingerprint")
      .hex(model.scaler_fingerprint)
      .endl();
  serialize(w, model.layout);
  for (const BoostRound& round : model.rounds) {
    w.tok("round").num(round.epsilon).num(round.alpha).endl();
    if (const LstmModel* lstm = std::get_if<LstmModel>(&round.learner)) {
      serialize(w, lstm->config);
      serialize(w, lstm->params);
    } else {
      serialize(w, std::get<Tree>(round.learner));
    }
  }
  return w.str();
}

EnsembleModel deserialize_ensemble(serial::Reader& r) {
  r.expect("ensemble");
  r.expect("v1");
  EnsembleModel model;
  r.expect("kind");
  const std::string kind = r.next();
  if (kind == "lstm")
    model.kind = LearnerKind::lstm;
  else if (kind == "tree")
    model.kind = LearnerKind::tree;
  else
    throw DataError("ensemble: unknown learner kind '" + kind + "'");
  r.expect("rounds");
  const std::int64_t rounds = r.next_int();
  r.expect("scaler_fingerprint");
  model.scaler_fingerprint = r.next_hex();
  model.layout = deserialize_layout(r);
  for (std::int64_t m = 0; m < rounds; ++m) {
    r.expect("round");
    BoostRound round;
    round.epsilon = r.next_double();
    round.alpha = r.next_double();
    if (model.kind == LearnerKind::lstm) {
      LstmModel learner;
      learner.config = deserialize_lstm_config(r);
      learner.params = deserialize_lstm(r);
      learner.layout = model.layout;
      round.learner = std::move(learner);
    } else {
      round.learner = deserialize_tree(r);
    }
    model.rounds.push_back(std::move(round));
  }
  return model;
}

}  // namespace clickboost
