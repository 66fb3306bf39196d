#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clickboost/serial.hpp"
#include "clickboost/types.hpp"

namespace clickboost {

/// Each tabular row unrolls into a length-F sequence of scalars: step t
/// feeds the t-th standardized feature under the canonical order.
struct SequenceLayout {
  Index seq_len = 0;       // T, equals the feature count
  std::vector<int> order;  // canonical feature order (identity by default)

  static SequenceLayout for_features(Index f);
  int feature_at(Index t) const {
    return order[static_cast<std::size_t>(t)];
  }
};

struct LstmParams {
  Index hidden = 0;  // H
  Index input = 1;   // D, per-step input width
  // gate weights over the concatenated [h_prev, x_t], each H x (H+D)
  Matrix w_forget, w_input, w_cand, w_output;
  Vector b_forget, b_input, b_cand, b_output;  // H each
  Vector w_out;                                // output head, H
  double b_out = 0.0;

  double squared_norm() const;
  LstmParams& operator+=(const LstmParams& other);
  LstmParams& operator*=(double s);
};

// gradient of the weighted loss, same block structure as the parameters
using LstmGrad = LstmParams;

struct LstmTrainConfig {
  Index hidden_size = 8;
  int epochs = 200;
  double learning_rate = 0.05;
  double grad_clip = 5.0;  // global L2 norm cap
  std::uint64_t seed = 0;
  double init_scale = 0.1;
};

/// Per-step gate activations kept for backpropagation through time.
struct GateCacheEntry {
  Vector f, i, c_tilde, o, c, h;
};
using GateCache = std::vector<GateCacheEntry>;

// One cell update: f,i,o = sigmoid(W [h;x] + b), c~ = tanh(W_c [h;x] + b_c),
// c = f.*c_prev + i.*c~, h = o.*tanh(c).
std::pair<Vector, Vector> cell_step(const LstmParams& params, const Vector& x_t,
                                    const Vector& h_prev, const Vector& c_prev,
                                    GateCacheEntry* cache = nullptr);

// Full unrolled pass from h_0 = c_0 = 0; returns sigmoid(w_out . h_T + b_out).
double forward(const LstmParams& params, const Vector& sample,
               const SequenceLayout& layout);

// L = sum_i w_i * [-y_i ln p_i - (1-y_i) ln(1-p_i)], p clamped to
// [1e-12, 1-1e-12] before the logarithms.
double weighted_loss(const Vector& probs, const IntVector& labels,
                     const Vector& weights);

// Exact gradient of weighted_loss over the batch via reverse-mode
// accumulation through all T steps.
LstmGrad backward(const LstmParams& params, const FeatureMatrix& batch,
                  const Vector& weights, const SequenceLayout& layout);

// Uniform [-init_scale, init_scale] weights from the seeded generator;
// forget-gate bias 1, other biases 0.
LstmParams init_params(const LstmTrainConfig& config, Index input_dim = 1);

// Full-batch gradient descent with global-norm clipping; bit-reproducible
// for identical (config, data, weights).
LstmParams train(const LstmTrainConfig& config, const FeatureMatrix& trainset,
                 const Vector& weights);

Vector predict_proba(const LstmParams& params, const FeatureMatrix& matrix,
                     const SequenceLayout& layout);
// label = 1 iff probability >= 0.5
IntVector predict(const LstmParams& params, const FeatureMatrix& matrix,
                  const SequenceLayout& layout, Vector* probs = nullptr);

void serialize(serial::Writer& w, const LstmParams& params);
LstmParams deserialize_lstm(serial::Reader& r);
void serialize(serial::Writer& w, const SequenceLayout& layout);
SequenceLayout deserialize_layout(serial::Reader& r);
void serialize(serial::Writer& w, const LstmTrainConfig& config);
LstmTrainConfig deserialize_lstm_config(serial::Reader& r);

/// Trained classifier bundle: parameters, the config that produced them and
/// the sequence layout needed at prediction time.
struct LstmModel {
  LstmParams params;
  LstmTrainConfig config;
  SequenceLayout layout;
};

std::string serialize_model(const LstmModel& model);
LstmModel deserialize_lstm_model(serial::Reader& r);

}  // namespace clickboost
