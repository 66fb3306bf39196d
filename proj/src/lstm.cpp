#include "clickboost/lstm.hpp"

#include <cmath>

#include "clickboost/errors.hpp"
#include "clickboost/rng.hpp"

namespace clickboost {
namespace {

constexpr double kProbClamp = 1e-12;

void check_dims(const LstmParams& p) {
  const Index h = p.hidden, z = p.hidden + p.input;
  auto bad = [&](const Matrix& m) { return m.rows() != h || m.cols() != z; };
  if (bad(p.w_forget) || bad(p.w_input) || bad(p.w_cand) || bad(p.w_output) ||
      p.b_forget.size() != h || p.b_input.size() != h ||
      p.b_cand.size() != h || p.b_output.size() != h || p.w_out.size() != h)
    throw DataError("lstm: parameter block dimensions are inconsistent");
}

// Batched caches: one H x N matrix per gate per step.
struct BatchCache {
  std::vector<Matrix> z;        // (H+D) x N per step
  std::vector<Matrix> f, i, ct, o, c, h;
};

// Forward over the whole batch at once; columns are samples.
Vector forward_batch(const LstmParams& p, const Matrix& steps /* T x N */,
                     BatchCache* cache) {
  const Index h = p.hidden, n = steps.cols(), t_len = steps.rows();
  Matrix h_prev = Matrix::Zero(h, n);
  Matrix c_prev = Matrix::Zero(h, n);
  if (cache) {
    cache->z.reserve(static_cast<std::size_t>(t_len));
    cache->f.reserve(static_cast<std::size_t>(t_len));
    cache->i.reserve(static_cast<std::size_t>(t_len));
    cache->ct.reserve(static_cast<std::size_t>(t_len));
    cache->o.reserve(static_cast<std::size_t>(t_len));
    cache->c.reserve(static_cast<std::size_t>(t_len));
    cache->h.reserve(static_cast<std::size_t>(t_len));
  }
  for (Index t = 0; t < t_len; ++t) {
    Matrix z(h + p.input, n);
    z.topRows(h) = h_prev;
    z.bottomRows(p.input) = steps.row(t);
    Matrix f = sigmoid(((p.w_forget * z).colwise() + p.b_forget).array());
    Matrix i = sigmoid(((p.w_input * z).colwise() + p.b_input).array());
    Matrix ct = ((p.w_cand * z).colwise() + p.b_cand).array().tanh();
    Matrix o = sigmoid(((p.w_output * z).colwise() + p.b_output).array());
    Matrix c = (f.array() * c_prev.array() + i.array() * ct.array()).matrix();
    Matrix hs = (o.array() * c.array().tanh()).matrix();
    if (cache) {
      cache->z.push_back(std::move(z));
      cache->f.push_back(std::move(f));
      cache->i.push_back(std::move(i));
      cache->ct.push_back(std::move(ct));
      cache->o.push_back(std::move(o));
      cache->c.push_back(c);
      cache->h.push_back(hs);
    }
    c_prev = std::move(c);
    h_prev = std::move(hs);
  }
  Vector logits = (p.w_out.transpose() * h_prev).transpose();
  logits.array() += p.b_out;
  return sigmoid(logits.array());
}

Matrix sequence_input(const FeatureMatrix& batch, const SequenceLayout& layout) {
  if (layout.seq_len != batch.cols() ||
      layout.order.size() != static_cast<std::size_t>(batch.cols()))
    throw DataError("lstm: sequence layout does not match feature count");
  Matrix steps(layout.seq_len, batch.rows());
  for (Index t = 0; t < layout.seq_len; ++t)
    steps.row(t) = batch.values.col(layout.feature_at(t)).transpose();
  return steps;
}

LstmGrad zero_grad(const LstmParams& p) {
  LstmGrad g;
  g.hidden = p.hidden;
  g.input = p.input;
  const Index h = p.hidden, z = p.hidden + p.input;
  g.w_forget = Matrix::Zero(h, z);
  g.w_input = Matrix::Zero(h, z);
  g.w_cand = Matrix::Zero(h, z);
  g.w_output = Matrix::Zero(h, z);
  g.b_forget = Vector::Zero(h);
  g.b_input = Vector::Zero(h);
  g.b_cand = Vector::Zero(h);
  g.b_output = Vector::Zero(h);
  g.w_out = Vector::Zero(h);
  g.b_out = 0.0;
  return g;
}

// BPTT over the cached batch pass. d_logit holds w_i * (p_i - y_i).
LstmGrad backward_cached(const LstmParams& p, const BatchCache& cache,
                         const Vector& d_logit) {
  const auto t_len = static_cast<Index>(cache.z.size());
  const Index h = p.hidden;
  LstmGrad g = zero_grad(p);

  g.w_out = cache.h.back() * d_logit;
  g.b_out = d_logit.sum();

  Matrix d_h = p.w_out * d_logit.transpose();  // H x N
  Matrix d_c = Matrix::Zero(h, d_logit.size());
  const Matrix c_zero = Matrix::Zero(h, d_logit.size());
  for (Index t = t_len - 1; t >= 0; --t) {
    const std::size_t ti = static_cast<std::size_t>(t);
    const Matrix tanh_c = cache.c[ti].array().tanh().matrix();
    Matrix d_o = (d_h.array() * tanh_c.array()).matrix();
    d_c.array() +=
        d_h.array() * cache.o[ti].array() * (1.0 - tanh_c.array().square());

    const Matrix& c_prev = (t == 0) ? c_zero : cache.c[ti - 1];
    Matrix d_ct = (d_c.array() * cache.i[ti].array()).matrix();
    Matrix d_i = (d_c.array() * cache.ct[ti].array()).matrix();
    Matrix d_f = (d_c.array() * c_prev.array()).matrix();
    Matrix d_c_prev = (d_c.array() * cache.f[ti].array()).matrix();

    // through the activations to the pre-activation sums
    Matrix a_f = (d_f.array() * cache.f[ti].array() *
                  (1.0 - cache.f[ti].array()))
                     .matrix();
    Matrix a_i = (d_i.array() * cache.i[ti].array() *
                  (1.0 - cache.i[ti].array()))
                     .matrix();
    Matrix a_c = (d_ct.array() * (1.0 - cache.ct[ti].array().square())).matrix();
    Matrix a_o = (d_o.array() * cache.o[ti].array() *
                  (1.0 - cache.o[ti].array()))
                     .matrix();

    g.w_forget.noalias() += a_f * cache.z[ti].transpose();
    g.w_input.noalias() += a_i * cache.z[ti].transpose();
    g.w_cand.noalias() += a_c * cache.z[ti].transpose();
    g.w_output.noalias() += a_o * cache.z[ti].transpose();
    g.b_forget += a_f.rowwise().sum();
    g.b_input += a_i.rowwise().sum();
    g.b_cand += a_c.rowwise().sum();
    g.b_output += a_o.rowwise().sum();

    Matrix d_z = p.w_forget.transpose() * a_f + p.w_input.transpose() * a_i +
                 p.w_cand.transpose() * a_c + p.w_output.transpose() * a_o;
    d_h = d_z.topRows(h);
    d_c = std::move(d_c_prev);
  }
  return g;
}

void validate_weights(const Vector& weights, Index n) {
  if (weights.size() != n)
    throw DataError("weight vector has " + std::to_string(weights.size()) +
                    " entries, expected " + std::to_string(n));
  if ((weights.array() < 0.0).any())
    throw DataError("weight vector has negative entries");
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw DataError("weight vector does not sum to 1");
}

}  // namespace

SequenceLayout SequenceLayout::for_features(Index f) {
  SequenceLayout layout;
  layout.seq_len = f;
  layout.order.resize(static_cast<std::size_t>(f));
  for (Index i = 0; i < f; ++i)
    layout.order[static_cast<std::size_t>(i)] = static_cast<int>(i);
  return layout;
}

double LstmParams::squared_norm() const {
  return w_forget.squaredNorm() + w_input.squaredNorm() +
         w_cand.squaredNorm() + w_output.squaredNorm() +
         b_forget.squaredNorm() + b_input.squaredNorm() +
         b_cand.squaredNorm() + b_output.squaredNorm() + w_out.squaredNorm() +
         b_out * b_out;
}

LstmParams& LstmParams::operator+=(const LstmParams& other) {
  w_forget += other.w_forget;
  w_input += other.w_input;
  w_cand += other.w_cand;
  w_output += other.w_output;
  b_forget += other.b_forget;
  b_input += other.b_input;
  b_cand += other.b_cand;
  b_output += other.b_output;
  w_out += other.w_out;
  b_out += other.b_out;
  return *this;
}

LstmParams& LstmParams::operator*=(double s) {
  w_forget *= s;
  w_input *= s;
  w_cand *= s;
  w_output *= s;
  b_forget *= s;
  b_input *= s;
  b_cand *= s;
  b_output *= s;
  w_out *= s;
  b_out *= s;
  return *this;
}

std::pair<Vector, Vector> cell_step(const LstmParams& params, const Vector& x_t,
                                    const Vector& h_prev, const Vector& c_prev,
                                    GateCacheEntry* cache) {
  check_dims(params);
  if (x_t.size() != params.input || h_prev.size() != params.hidden ||
      c_prev.size() != params.hidden)
    throw DataError("cell_step: input dimensions do not match parameters");
  Vector z(params.hidden + params.input);
  z << h_prev, x_t;
  Vector f = sigmoid((params.w_forget * z + params.b_forget).array());
  Vector i = sigmoid((params.w_input * z + params.b_input).array());
  Vector ct = (params.w_cand * z + params.b_cand).array().tanh();
  Vector o = sigmoid((params.w_output * z + params.b_output).array());
  Vector c = (f.array() * c_prev.array() + i.array() * ct.array()).matrix();
  Vector h = (o.array() * c.array().tanh()).matrix();
  if (!h.allFinite() || !c.allFinite())
    throw DataError("cell_step: non-finite result");
  if (cache) *cache = GateCacheEntry{f, i, ct, o, c, h};
  return {h, c};
}

double forward(const LstmParams& params, const Vector& sample,
               const SequenceLayout& layout) {
  check_dims(params);
  if (params.input != 1)
    throw DataError("forward: feature-unrolled layout expects D = 1");
  if (layout.seq_len != sample.size())
    throw DataError("forward: layout length does not match sample size");
  Vector h = Vector::Zero(params.hidden);
  Vector c = Vector::Zero(params.hidden);
  Vector x(1);
  for (Index t = 0; t < layout.seq_len; ++t) {
    x(0) = sample(layout.feature_at(t));
    std::tie(h, c) = cell_step(params, x, h, c);
  }
  const double logit = params.w_out.dot(h) + params.b_out;
  if (!std::isfinite(logit)) throw DataError("forward: non-finite logit");
  return sigmoid(logit);
}

double weighted_loss(const Vector& probs, const IntVector& labels,
                     const Vector& weights) {
  if (probs.size() != labels.size())
    throw DataError("weighted_loss: probs/labels length mismatch");
  validate_weights(weights, labels.size());
  double loss = 0.0;
  for (Index i = 0; i < probs.size(); ++i) {
    const double p =
        std::min(std::max(probs(i), kProbClamp), 1.0 - kProbClamp);
    loss += weights(i) * (labels(i) == 1 ? -std::log(p) : -std::log(1.0 - p));
  }
  return loss;
}

LstmGrad backward(const LstmParams& params, const FeatureMatrix& batch,
                  const Vector& weights, const SequenceLayout& layout) {
  check_dims(params);
  validate_weights(weights, batch.rows());
  BatchCache cache;
  const Matrix steps = sequence_input(batch, layout);
  const Vector probs = forward_batch(params, steps, &cache);
  Vector d_logit(batch.rows());
  for (Index i = 0; i < batch.rows(); ++i)
    d_logit(i) = weights(i) * (probs(i) - static_cast<double>(batch.labels(i)));
  LstmGrad g = backward_cached(params, cache, d_logit);
  if (!std::isfinite(g.squared_norm())) {
    for (const auto* block :
         {&g.w_forget, &g.w_input, &g.w_cand, &g.w_output})
      if (!block->allFinite())
        throw DataError("backward: non-finite gradient in a gate weight block");
    throw DataError("backward: non-finite gradient");
  }
  return g;
}

LstmParams init_params(const LstmTrainConfig& config, Index input_dim) {
  if (config.hidden_size < 1)
    throw DataError("lstm: hidden_size must be positive");
  if (config.init_scale <= 0.0)
    throw DataError("lstm: init_scale must be positive");
  LstmParams p;
  p.hidden = config.hidden_size;
  p.input = input_dim;
  const Index h = p.hidden, z = h + p.input;
  Rng rng(config.seed);
  auto fill = [&](Matrix& m) {
    m.resize(h, z);
    for (Index r = 0; r < h; ++r)
      for (Index c = 0; c < z; ++c)
        m(r, c) = rng.uniform(-config.init_scale, config.init_scale);
  };
  fill(p.w_forget);
  fill(p.w_input);
  fill(p.w_cand);
  fill(p.w_output);
  p.w_out.resize(h);
  for (Index i = 0; i < h; ++i)
    p.w_out(i) = rng.uniform(-config.init_scale, config.init_scale);
  p.b_forget = Vector::Ones(h);  // forget-bias convention
  p.b_input = Vector::Zero(h);
  p.b_cand = Vector::Zero(h);
  p.b_output = Vector::Zero(h);
  p.b_out = 0.0;
  return p;
}

LstmParams train(const LstmTrainConfig& config, const FeatureMatrix& trainset,
                 const Vector& weights) {
  if (config.epochs < 1) throw DataError("lstm: epochs must be positive");
  if (config.learning_rate < 0.0)
    throw DataError("lstm: learning_rate must be nonnegative");
  if (config.grad_clip <= 0.0)
    throw DataError("lstm: grad_clip must be positive");
  validate_weights(weights, trainset.rows());

  const SequenceLayout layout = SequenceLayout::for_features(trainset.cols());
  const Matrix steps = sequence_input(trainset, layout);
  LstmParams params = init_params(config, 1);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    BatchCache cache;
    const Vector probs = forward_batch(params, steps, &cache);
    const double loss = weighted_loss(probs, trainset.labels, weights);
    if (!std::isfinite(loss))
      throw TrainError("lstm: non-finite loss at epoch " +
                       std::to_string(epoch));
    Vector d_logit(trainset.rows());
    for (Index i = 0; i < trainset.rows(); ++i)
      d_logit(i) =
          weights(i) * (probs(i) - static_cast<double>(trainset.labels(i)));
    LstmGrad g = backward_cached(params, cache, d_logit);
    const double norm = std::sqrt(g.squared_norm());
    if (!std::isfinite(norm))
      throw TrainError("lstm: non-finite gradient at epoch " +
                       std::to_string(epoch));
    if (norm > config.grad_clip) g *= config.grad_clip / norm;
    g *= -config.learning_rate;
    params += g;
  }
  return params;
}

Vector predict_proba(const LstmParams& params, const FeatureMatrix& matrix,
                     const SequenceLayout& layout) {
  Vector probs(matrix.rows());
  for (Index i = 0; i < matrix.rows(); ++i)
    probs(i) = forward(params, matrix.values.row(i).transpose(), layout);
  return probs;
}

IntVector predict(const LstmParams& params, const FeatureMatrix& matrix,
                  const SequenceLayout& layout, Vector* probs) {
  Vector p = predict_proba(params, matrix, layout);
  IntVector labels(p.size());
  for (Index i = 0; i < p.size(); ++i) labels(i) = p(i) >= 0.5 ? 1 : 0;
  if (probs) *probs = std::move(p);
  return labels;
}

void serialize(serial::Writer& w, const LstmParams& params) {
  w.tok("lstm").tok("v1").endl();
  w.tok("hidden").num(params.hidden).tok("input").num(params.input).endl();
  w.tok("w_forget").mat(params.w_forget).endl();
  w.tok("b_forget").vec(params.b_forget).endl();
  w.tok("w_input").mat(params.w_input).endl();
  w.tok("b_input").vec(params.b_input).endl();
  w.tok("w_cand").mat(params.w_cand).endl();
  w.tok("b_cand").vec(params.b_cand).endl();
  w.tok("w_output").mat(params.w_output).endl();
  w.tok("b_output").vec(params.b_output).endl();
  w.tok("w_out").vec(params.w_out).endl();
  w.tok("b_out").num(params.b_out).endl();
}

LstmParams deserialize_lstm(serial::Reader& r) {
  r.expect("lstm");
  r.expect("v1");
  LstmParams p;
  r.expect("hidden");
  p.hidden = r.next_int();
  r.expect("input");
  p.input = r.next_int();
  r.expect("w_forget");
  p.w_forget = r.next_matrix();
  r.expect("b_forget");
  p.b_forget = r.next_vector();
  r.expect("w_input");
  p.w_input = r.next_matrix();
  r.expect("b_input");
  p.b_input = r.next_vector();
  r.expect("w_cand");
  p.w_cand = r.next_matrix();
  r.expect("b_cand");
  p.b_cand = r.next_vector();
  r.expect("w_output");
  p.w_output = r.next_matrix();
  r.expect("b_output");
  p.b_output = r.next_vector();
  r.expect("w_out");
  p.w_out = r.next_vector();
  r.expect("b_out");
  p.b_out = r.next_double();
  check_dims(p);
  return p;
}

void serialize(serial::Writer& w, const SequenceLayout& layout) {
  w.tok("layout").num(layout.seq_len);
  for (int v : layout.order) w.num(v);
  w.endl();
}

SequenceLayout deserialize_layout(serial::Reader& r) {
  r.expect("layout");
  SequenceLayout layout;
  layout.seq_len = r.next_int();
  layout.order.resize(static_cast<std::size_t>(layout.seq_len));
  for (auto& v : layout.order) v = static_cast<int>(r.next_int());
  return layout;
}

void serialize(serial::Writer& w, const LstmTrainConfig& config) {
  w.tok("config")
      .num(config.hidden_size)
      .num(config.epochs)
      .num(config.learning_rate)
      .num(config.grad_clip)
      .hex(config.seed)
      .num(config.init_scale)
      .endl();
}

LstmTrainConfig deserialize_lstm_config(serial::Reader& r) {
  r.expect("config");
  LstmTrainConfig c;
  c.hidden_size = r.next_int();
  c.epochs = static_cast<int>(r.next_int());
  c.learning_rate = r.next_double();
  c.grad_clip = r.next_double();
  c.seed = r.next_hex();
  c.init_scale = r.next_double();
  return c;
}

std::string serialize_model(const LstmModel& model) {
  serial::Writer w;
  w.tok("lstm-model").tok("v1").endl();
  serialize(w, model.config);
  serialize(w, model.layout);
  serialize(w, model.params);
  return w.str();
}

LstmModel deserialize_lstm_model(serial::Reader& r) {
  r.expect("lstm-model");
  r.expect("v1");
  LstmModel m;
  m.config = deserialize_lstm_config(r);
  m.layout = deserialize_layout(r);
  m.params = deserialize_lstm(r);
  return m;
}

}  // namespace clickboost
