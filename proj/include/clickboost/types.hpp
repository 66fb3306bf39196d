#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace clickboost {

constexpr const char* kVersion = "0.1.0";

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Elementwise sigmoid over any dense expression.
template <class Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 / (1.0 + (-x).exp());
}

/// Per-feature z-score parameters fitted on the training partition.
struct ScalerParams {
  Vector center;  // per feature
  Vector scale;   // per feature, strictly positive

  Index size() const { return center.size(); }
  // Hash of the exact bit patterns; two scalers match iff fitted on
  // identical data.
  std::uint64_t fingerprint() const;
};

/// Encoded design matrix with binary labels. Immutable after construction.
struct FeatureMatrix {
  Matrix values;                           // N x F
  IntVector labels;                        // N entries in {0,1}
  std::vector<std::string> feature_names;  // F names
  std::optional<ScalerParams> scaler;      // set once standardized

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

}  // namespace clickboost
