#include "clickboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "clickboost/errors.hpp"

namespace clickboost {
namespace {

struct WeightedGini {
  double impurity(double w0, double w1) const {
    const double w = w0 + w1;
    if (w <= 0.0) return 0.0;
    const double p0 = w0 / w, p1 = w1 / w;
    return 1.0 - p0 * p0 - p1 * p1;
  }
};

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted Gini after the split
};

class CartBuilder {
 public:
  CartBuilder(const FeatureMatrix& data, const std::vector<int>& rows,
              const Vector& row_weights, const TreeConfig& config,
              const FeatureSampler& sampler)
      : data_(data),
        rows_(rows),
        weights_(row_weights),
        config_(config),
        sampler_(sampler) {}

  Tree build() {
    Tree tree;
    std::vector<int> positions(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i)
      positions[i] = static_cast<int>(i);
    grow(tree, positions, 0);
    return tree;
  }

 private:
  // positions index into rows_/weights_; returns the new node's index
  int grow(Tree& tree, std::vector<int>& positions, int depth) {
    double w0 = 0.0, w1 = 0.0;
    bool pure = true;
    const int first_label = label(positions.front());
    for (int pos : positions) {
      (label(pos) == 1 ? w1 : w0) += weights_(pos);
      pure = pure && label(pos) == first_label;
    }
    const double w = w0 + w1;
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(node_index)].value =
        w > 0.0 ? w1 / w : 0.5;

    if (pure || depth >= config_.max_depth) return node_index;

    const auto choice = best_split(positions, w0, w1);
    if (!choice) return node_index;

    std::vector<int> left, right;
    left.reserve(positions.size());
    right.reserve(positions.size());
    for (int pos : positions) {
      (value(pos, choice->feature) <= choice->threshold ? left : right)
          .push_back(pos);
    }
    positions.clear();
    positions.shrink_to_fit();

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

  std::optional<Candidate> best_split(const std::vector<int>& positions,
                                      double w0, double w1) {
    const double w_total = w0 + w1;
    const double parent = gini_.impurity(w0, w1);
    const auto n_features = static_cast<int>(data_.cols());
    std::vector<int> features;
    if (sampler_)
      features = sampler_(n_features);
    else
      for (int f = 0; f < n_features; ++f) features.push_back(f);

    std::optional<Candidate> best;
    std::vector<std::pair<double, int>> sorted;  // (feature value, position)
    for (int f : features) {
      sorted.clear();
      sorted.reserve(positions.size());
      for (int pos : positions) sorted.emplace_back(value(pos, f), pos);
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double lw0 = 0.0, lw1 = 0.0;
      long ln = 0;
      const auto total = static_cast<long>(sorted.size());
      for (long k = 0; k + 1 < total; ++k) {
        const auto& [v, pos] = sorted[static_cast<std::size_t>(k)];
        (label(pos) == 1 ? lw1 : lw0) += weights_(pos);
        ++ln;
        const double v_next = sorted[static_cast<std::size_t>(k + 1)].first;
        if (v == v_next) continue;
        const double threshold = v + (v_next - v) / 2.0;
        // adjacent representable values can collapse the midpoint
        if (!(threshold > v && threshold < v_next)) continue;
        if (ln < config_.min_samples_leaf ||
            total - ln < config_.min_samples_leaf)
          continue;
        const double rw0 = w0 - lw0, rw1 = w1 - lw1;
        if (lw0 + lw1 < config_.min_weight_leaf ||
            rw0 + rw1 < config_.min_weight_leaf)
          continue;
        const double impurity = ((lw0 + lw1) / w_total) * gini_.impurity(lw0, lw1) +
                                ((rw0 + rw1) / w_total) * gini_.impurity(rw0, rw1);
        if (!best || impurity < best->impurity)
          best = Candidate{f, threshold, impurity};
      }
    }
    if (best && best->impurity < parent) return best;
    return std::nullopt;
  }

  double value(int pos, int feature) const {
    return data_.values(rows_[static_cast<std::size_t>(pos)], feature);
  }
  int label(int pos) const {
    return data_.labels(rows_[static_cast<std::size_t>(pos)]);
  }

  const FeatureMatrix& data_;
  const std::vector<int>& rows_;
  const Vector& weights_;
  TreeConfig config_;
  FeatureSampler sampler_;
  WeightedGini gini_;
};

int depth_below(const Tree& tree, int index) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
  if (node.is_leaf) return 0;
  return 1 + std::max(depth_below(tree, node.left),
                      depth_below(tree, node.right));
}

}  // namespace

int Tree::depth() const { return nodes.empty() ? 0 : depth_below(*this, 0); }

double Tree::eval(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  if (nodes.empty()) throw DataError("tree: empty model");
  int index = 0;
  for (;;) {
    const TreeNode& node = nodes[static_cast<std::size_t>(index)];
    if (node.is_leaf) return node.value;
    if (node.feature < 0 || node.feature >= x.size())
      throw DataError("tree: feature index out of range");
    if (node.left < 0 || node.right < 0 ||
        node.left >= static_cast<int>(nodes.size()) ||
        node.right >= static_cast<int>(nodes.size()))
      throw DataError("tree: malformed node with dangling child");
    index = x(node.feature) <= node.threshold ? node.left : node.right;
  }
}

Tree tree_fit(const FeatureMatrix& data, const Vector& weights,
              const TreeConfig& config) {
  if (data.rows() < 1) throw DataError("tree_fit: empty dataset");
  if (weights.size() != data.rows())
    throw DataError("tree_fit: weight/row count mismatch");
  std::vector<int> rows(static_cast<std::size_t>(data.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  return tree_fit_rows(data, rows, weights, config);
}

Tree tree_fit_rows(const FeatureMatrix& data, const std::vector<int>& rows,
                   const Vector& row_weights, const TreeConfig& config,
                   const FeatureSampler& sampler) {
  if (rows.empty()) throw DataError("tree_fit: empty row set");
  if (row_weights.size() != static_cast<Index>(rows.size()))
    throw DataError("tree_fit: weight/row count mismatch");
  if (config.max_depth < 0 || config.min_samples_leaf < 1 ||
      config.min_weight_leaf < 0.0)
    throw DataError("tree_fit: invalid tree config");
  CartBuilder builder(data, rows, row_weights, config, sampler);
  return builder.build();
}

Vector tree_predict_proba(const Tree& tree, const Matrix& x) {
  Vector probs(x.rows());
  for (Index i = 0; i < x.rows(); ++i) probs(i) = tree.eval(x.row(i));
  return probs;
}

IntVector tree_predict(const Tree& tree, const Matrix& x, Vector* probs) {
  Vector p = tree_predict_proba(tree, x);
  IntVector labels(p.size());
  for (Index i = 0; i < p.size(); ++i) labels(i) = p(i) >= 0.5 ? 1 : 0;
  if (probs) *probs = std::move(p);
  return labels;
}

void serialize(serial::Writer& w, const Tree& tree) {
  w.tok("tree").tok("v1").num(static_cast<std::int64_t>(tree.nodes.size()))
      .endl();
  for (const TreeNode& node : tree.nodes) {
    if (node.is_leaf) {
      w.tok("leaf").num(node.value).endl();
    } else {
      w.tok("split")
          .num(node.feature)
          .num(node.threshold)
          .num(node.left)
          .num(node.right)
          .endl();
    }
  }
}

Tree deserialize_tree(serial::Reader& r) {
  r.expect("tree");
  r.expect("v1");
  const std::int64_t count = r.next_int();
  if (count < 0) throw DataError("tree: negative node count");
  Tree tree;
  tree.nodes.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    TreeNode node;
    const std::string tag = r.next();
    if (tag == "leaf") {
      node.is_leaf = true;
      node.value = r.next_double();
    } else if (tag == "split") {
      node.is_leaf = false;
      node.feature = static_cast<int>(r.next_int());
      node.threshold = r.next_double();
      node.left = static_cast<int>(r.next_int());
      node.right = static_cast<int>(r.next_int());
    } else {
      throw DataError("tree: unexpected node tag '" + tag + "'");
    }
    tree.nodes.push_back(node);
  }
  return tree;
}

}  // namespace clickboost
