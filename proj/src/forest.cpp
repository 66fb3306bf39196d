#include "clickboost/forest.hpp"

#include <cmath>

#include "clickboost/errors.hpp"
#include "clickboost/rng.hpp"

namespace clickboost {

ForestModel forest_fit(const FeatureMatrix& data, const ForestConfig& config) {
  if (config.n_trees < 1) throw DataError("forest_fit: n_trees must be >= 1");
  const auto n = data.rows();
  const auto f = static_cast<int>(data.cols());
  if (n < 1) throw DataError("forest_fit: empty dataset");

  ForestConfig effective = config;
  if (effective.m_try == 0)
    effective.m_try =
        static_cast<int>(std::ceil(std::sqrt(static_cast<double>(f))));
  if (effective.m_try < 1 || effective.m_try > f)
    throw DataError("forest_fit: m_try " + std::to_string(effective.m_try) +
                    " is outside [1, " + std::to_string(f) + "]");

  ForestModel model;
  model.config = effective;
  model.trees.reserve(static_cast<std::size_t>(effective.n_trees));

  // Per-tree seeds are pre-derived, so trees could be fitted concurrently;
  // fitting stays sequential to keep artifact bytes identical everywhere.
  for (int t = 0; t < effective.n_trees; ++t) {
    Rng rng(seed_for(effective.seed, "tree", static_cast<std::uint64_t>(t)));
    std::vector<int> rows(static_cast<std::size_t>(n));
    if (effective.bootstrap) {
      for (auto& r : rows)
        r = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
    } else {
      for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = static_cast<int>(i);
    }
    const Vector weights =
        Vector::Constant(n, 1.0 / static_cast<double>(n));
    FeatureSampler sampler;
    if (effective.m_try < f)
      sampler = [&rng, m = effective.m_try](int n_features) {
        return rng.sample_distinct(n_features, m);
      };
    model.trees.push_back(
        tree_fit_rows(data, rows, weights, effective.tree, sampler));
  }
  return model;
}

Vector forest_predict_proba(const ForestModel& model, const Matrix& x) {
  if (model.trees.empty()) throw DataError("forest: empty model");
  Vector probs = Vector::Zero(x.rows());
  for (const Tree& tree : model.trees) probs += tree_predict_proba(tree, x);
  probs /= static_cast<double>(model.trees.size());
  return probs;
}

IntVector forest_predict(const ForestModel& model, const Matrix& x,
                         Vector* probs) {
  Vector p = forest_predict_proba(model, x);
  IntVector labels(p.size());
  for (Index i = 0; i < p.size(); ++i) labels(i) = p(i) >= 0.5 ? 1 : 0;
  if (probs) *probs = std::move(p);
  return labels;
}

void serialize(serial::Writer& w, const ForestModel& model) {
  w.tok("forest").tok("v1").endl();
  w.tok("n_trees")
      .num(static_cast<std::int64_t>(model.trees.size()))
      .tok("m_try")
      .num(model.config.m_try)
      .tok("bootstrap")
      .num(static_cast<std::int64_t>(model.config.bootstrap ? 1 : 0))
      .tok("seed")
      .hex(model.config.seed)
      .endl();
  w.tok("tree_config")
      .num(model.config.tree.max_depth)
      .num(model.config.tree.min_samples_leaf)
      .num(model.config.tree.min_weight_leaf)
      .endl();
  for (const Tree& tree : model.trees) serialize(w, tree);
}

ForestModel deserialize_forest(serial::Reader& r) {
  r.expect("forest");
  r.expect("v1");
  ForestModel model;
  r.expect("n_trees");
  const std::int64_t n_trees = r.next_int();
  r.expect("m_try");
  model.config.m_try = static_cast<int>(r.next_int());
  r.expect("bootstrap");
  model.config.bootstrap = r.next_int() != 0;
  r.expect("seed");
  model.config.seed = r.next_hex();
  r.expect("tree_config");
  model.config.tree.max_depth = static_cast<int>(r.next_int());
  model.config.tree.min_samples_leaf = static_cast<int>(r.next_int());
  model.config.tree.min_weight_leaf = r.next_double();
  model.config.n_trees = static_cast<int>(n_trees);
  for (std::int64_t i = 0; i < n_trees; ++i)
    model.trees.push_back(deserialize_tree(r));
  return model;
}

}  // namespace clickboost
