#pragma once

#include <string>
#include <vector>

#include "clickboost/dataset.hpp"
#include "clickboost/types.hpp"

namespace clickboost {

enum class TextPolicy { drop, frequency };

struct EncodingConfig {
  // Categorical columns at or below the cap are one-hot encoded, above it
  // frequency-encoded (value -> its relative frequency in the fit table).
  int onehot_cap = 12;
  // Unknown category at transform time: throw when strict, else encode as 0
  // and count a warning.
  bool strict = false;
  TextPolicy text_policy = TextPolicy::drop;
  // Free-text columns; never one-hot regardless of cardinality.
  std::vector<std::string> text_columns = {"Ad Topic Line"};
};

/// Fitted per-column transforms; apply is a pure function of (table, model).
struct EncoderModel {
  enum class Transform { copy, onehot, binary, frequency, hour_weekday, drop };

  struct ColumnCodec {
    int column = 0;  // schema index
    Transform transform = Transform::copy;
    std::vector<std::string> categories;  // sorted, fit-table values
    std::vector<double> frequencies;      // parallel to categories
  };

  std::vector<ColumnSchema> schema;
  std::vector<ColumnCodec> codecs;
  std::vector<std::string> feature_names;
  EncodingConfig config;
};

EncoderModel fit_encoder(const RawTable& table, const EncodingConfig& config);
FeatureMatrix apply_encoder(const RawTable& table, const EncoderModel& model,
                            long* unknown_category_count = nullptr);
/// fit_encoder + apply_encoder on the same table.
FeatureMatrix encode(const RawTable& table, const EncodingConfig& config = {});

// z-score per feature; constant features keep scale 1 and center to 0.
std::pair<FeatureMatrix, ScalerParams> fit_standardize(
    const FeatureMatrix& matrix);
FeatureMatrix apply_standardize(const FeatureMatrix& matrix,
                                const ScalerParams& params);

}  // namespace clickboost
