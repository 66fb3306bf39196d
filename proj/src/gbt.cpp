#include "clickboost/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "clickboost/errors.hpp"

namespace clickboost {
namespace {

constexpr double kProbClamp = 1e-12;

struct GainCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class GbtBuilder {
 public:
  GbtBuilder(const Matrix& x, const Vector& grad, const Vector& hess,
             const GbtConfig& config)
      : x_(x), grad_(grad), hess_(hess), config_(config) {}

  Tree build() {
    Tree tree;
    std::vector<int> rows(static_cast<std::size_t>(x_.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    grow(tree, rows, 0);
    return tree;
  }

 private:
  double score(double g, double h) const {
    return g * g / (h + config_.lambda);
  }

  int grow(Tree& tree, std::vector<int>& rows, int depth) {
    double g_sum = 0.0, h_sum = 0.0;
    for (int r : rows) {
      g_sum += grad_(r);
      h_sum += hess_(r);
    }
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(node_index)].value =
        -g_sum / (h_sum + config_.lambda);

    if (depth >= config_.tree.max_depth) return node_index;
    const auto choice = best_split(rows, g_sum, h_sum);
    if (!choice) return node_index;

    std::vector<int> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (int r : rows)
      (x_(r, choice->feature) <= choice->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int left_index = grow(tree, left, depth + 1);
    const int right_index = grow(tree, right, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.is_leaf = false;
    node.feature = choice->feature;
    node.threshold = choice->threshold;
    node.left = left_index;
    node.right = right_index;
    return node_index;
  }

  std::optional<GainCandidate> best_split(const std::vector<int>& rows,
                                          double g_sum, double h_sum) {
    std::optional<GainCandidate> best;
    std::vector<std::pair<double, int>> sorted;
    for (int f = 0; f < static_cast<int>(x_.cols()); ++f) {
      sorted.clear();
      sorted.reserve(rows.size());
      for (int r : rows) sorted.emplace_back(x_(r, f), r);
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double gl = 0.0, hl = 0.0;
      long ln = 0;
      const auto total = static_cast<long>(sorted.size());
      for (long k = 0; k + 1 < total; ++k) {
        const auto& [v, r] = sorted[static_cast<std::size_t>(k)];
        gl += grad_(r);
        hl += hess_(r);
        ++ln;
        const double v_next = sorted[static_cast<std::size_t>(k + 1)].first;
        if (v == v_next) continue;
        const double threshold = v + (v_next - v) / 2.0;
        if (!(threshold > v && threshold < v_next)) continue;
        if (ln < config_.tree.min_samples_leaf ||
            total - ln < config_.tree.min_samples_leaf)
          continue;
        const double gr = g_sum - gl, hr = h_sum - hl;
        if (hl < config_.tree.min_weight_leaf ||
            hr < config_.tree.min_weight_leaf)
          continue;
        const double gain =
            0.5 * (score(gl, hl) + score(gr, hr) - score(g_sum, h_sum)) -
            config_.gamma;
        if (gain > 0.0 && (!best || gain > best->gain))
          best = GainCandidate{f, threshold, gain};
      }
    }
    return best;
  }

  const Matrix& x_;
  const Vector& grad_;
  const Vector& hess_;
  const GbtConfig& config_;
};

void validate_config(const GbtConfig& config) {
  if (config.n_rounds < 0) throw DataError("gbt: n_rounds must be >= 0");
  if (!(config.eta > 0.0 && config.eta <= 1.0))
    throw DataError("gbt: eta must lie in (0, 1]");
  if (config.lambda < 0.0) throw DataError("gbt: lambda must be >= 0");
  if (config.gamma < 0.0) throw DataError("gbt: gamma must be >= 0");
}

}  // namespace

Tree gbt_grow_tree(const Matrix& x, const Vector& grad, const Vector& hess,
                   const GbtConfig& config) {
  if (x.rows() < 1) throw DataError("gbt: empty dataset");
  if (grad.size() != x.rows() || hess.size() != x.rows())
    throw DataError("gbt: gradient/hessian length mismatch");
  validate_config(config);
  GbtBuilder builder(x, grad, hess, config);
  return builder.build();
}

GbtModel gbt_fit(const FeatureMatrix& data, const GbtConfig& config) {
  validate_config(config);
  if (config.n_rounds < 1) throw DataError("gbt_fit: n_rounds must be >= 1");
  const Index n = data.rows();
  if (n < 1) throw DataError("gbt_fit: empty dataset");

  const double mean_label =
      data.labels.cast<double>().sum() / static_cast<double>(n);
  const double clamped =
      std::min(std::max(mean_label, kProbClamp), 1.0 - kProbClamp);

  GbtModel model;
  model.config = config;
  model.base_score = std::log(clamped / (1.0 - clamped));

  Vector margin = Vector::Constant(n, model.base_score);
  Vector grad(n), hess(n);
  for (int round = 0; round < config.n_rounds; ++round) {
    for (Index i = 0; i < n; ++i) {
      const double p = sigmoid(margin(i));
      grad(i) = p - static_cast<double>(data.labels(i));
      hess(i) = p * (1.0 - p);
    }
    Tree tree = gbt_grow_tree(data.values, grad, hess, config);
    for (Index i = 0; i < n; ++i)
      margin(i) += config.eta * tree.eval(data.values.row(i));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

Vector gbt_margin(const GbtModel& model, const Matrix& x) {
  Vector margin = Vector::Constant(x.rows(), model.base_score);
  for (const Tree& tree : model.trees)
    for (Index i = 0; i < x.rows(); ++i)
      margin(i) += model.config.eta * tree.eval(x.row(i));
  return margin;
}

Vector gbt_predict_proba(const GbtModel& model, const Matrix& x) {
  return sigmoid(gbt_margin(model, x).array());
}

IntVector gbt_predict(const GbtModel& model, const Matrix& x, Vector* probs) {
  Vector p = gbt_predict_proba(model, x);
  IntVector labels(p.size());
  for (Index i = 0; i < p.size(); ++i) labels(i) = p(i) >= 0.5 ? 1 : 0;
  if (probs) *probs = std::move(p);
  return labels;
}

void serialize(serial::Writer& w, const GbtModel& model) {
  w.tok("gbt").tok("v1").endl();
  w.tok("rounds")
      .num(static_cast<std::int64_t>(model.trees.size()))
      .tok("eta")
      .num(model.config.eta)
      .tok("lambda")
      .num(model.config.lambda)
      .tok("gamma")
      .num(model.config.gamma)
      .tok("base_score")
      .num(model.base_score)
      .endl();
  w.tok("tree_config")
      .num(model.config.tree.max_depth)
      .num(model.config.tree.min_samples_leaf)
      .num(model.config.tree.min_weight_leaf)
      .endl();
  for (const Tree& tree : model.trees) serialize(w, tree);
}

GbtModel deserialize_gbt(serial::Reader& r) {
  r.expect("gbt");
  r.expect("v1");
  GbtModel model;
  r.expect("rounds");
  const std::int64_t rounds = r.next_int();
  r.expect("eta");
  model.config.eta = r.next_double();
  r.expect("lambda");
  model.config.lambda = r.next_double();
  r.expect("gamma");
  model.config.gamma = r.next_double();
  r.expect("base_score");
  model.base_score = r.next_double();
  r.expect("tree_config");
  model.config.tree.max_depth = static_cast<int>(r.next_int());
  model.config.tree.min_samples_leaf = static_cast<int>(r.next_int());
  model.config.tree.min_weight_leaf = r.next_double();
  model.config.n_rounds = static_cast<int>(rounds);
  for (std::int64_t i = 0; i < rounds; ++i)
    model.trees.push_back(deserialize_tree(r));
  return model;
}

}  // namespace clickboost
