#include "clickboost/encode.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "clickboost/errors.hpp"
#include "clickboost/rng.hpp"

namespace clickboost {
namespace {

bool is_text_column(const std::string& name, const EncodingConfig& config) {
  return std::find(config.text_columns.begin(), config.text_columns.end(),
                   name) != config.text_columns.end();
}

// index of `value` in the sorted category list, or -1
int category_index(const std::vector<std::string>& categories,
                   const std::string& value) {
  auto it = std::lower_bound(categories.begin(), categories.end(), value);
  if (it == categories.end() || *it != value) return -1;
  return static_cast<int>(it - categories.begin());
}

}  // namespace

std::uint64_t ScalerParams::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
    h = splitmix64(h);
  };
  mix(static_cast<std::uint64_t>(center.size()));
  for (Index i = 0; i < center.size(); ++i) {
    mix(std::bit_cast<std::uint64_t>(center(i)));
    mix(std::bit_cast<std::uint64_t>(scale(i)));
  }
  return h;
}

EncoderModel fit_encoder(const RawTable& table, const EncodingConfig& config) {
  validate_schema(table.schema);
  EncoderModel model;
  model.schema = table.schema;
  model.config = config;

  for (int c = 0; c < table.n_cols(); ++c) {
    const ColumnSchema& col = table.schema[static_cast<std::size_t>(c)];
    EncoderModel::ColumnCodec codec;
    codec.column = c;
    switch (col.kind) {
      case ColumnKind::label:
        continue;
      case ColumnKind::numeric:
        codec.transform = EncoderModel::Transform::copy;
        model.feature_names.push_back(col.name);
        break;
      case ColumnKind::timestamp:
        codec.transform = EncoderModel::Transform::hour_weekday;
        model.feature_names.push_back(col.name + "#hour");
        model.feature_names.push_back(col.name + "#weekday");
        break;
      case ColumnKind::categorical: {
        const bool text = is_text_column(col.name, config);
        if (text && config.text_policy == TextPolicy::drop) {
          codec.transform = EncoderModel::Transform::drop;
          break;
        }
        std::map<std::string, long> counts;
        for (const auto& row : table.rows)
          ++counts[std::get<std::string>(row[static_cast<std::size_t>(c)])];
        for (const auto& [value, count] : counts) {
          codec.categories.push_back(value);
          codec.frequencies.push_back(static_cast<double>(count) /
                                      static_cast<double>(table.n_rows()));
        }
        const auto cardinality = static_cast<int>(codec.categories.size());
        if (!text && cardinality == 2) {
          // binary column (e.g. gender) -> one 0/1 indicator
          codec.transform = EncoderModel::Transform::binary;
          model.feature_names.push_back(col.name + "=" + codec.categories[1]);
        } else if (!text && cardinality <= config.onehot_cap) {
          codec.transform = EncoderModel::Transform::onehot;
          for (const auto& cat : codec.categories)
            model.feature_names.push_back(col.name + "=" + cat);
        } else {
          codec.transform = EncoderModel::Transform::frequency;
          model.feature_names.push_back(col.name + "#freq");
        }
        break;
      }
    }
    model.codecs.push_back(std::move(codec));
  }
  return model;
}

FeatureMatrix apply_encoder(const RawTable& table, const EncoderModel& model,
                            long* unknown_category_count) {
  if (table.schema.size() != model.schema.size())
    throw DataError("apply_encoder: table schema does not match the encoder");
  for (std::size_t i = 0; i < table.schema.size(); ++i)
    if (table.schema[i].name != model.schema[i].name)
      throw DataError("apply_encoder: column '" + table.schema[i].name +
                      "' does not match encoder column '" +
                      model.schema[i].name + "'");

  const Index n = table.n_rows();
  const auto f = static_cast<Index>(model.feature_names.size());
  const int label_col = table.label_column();

  FeatureMatrix out;
  out.feature_names = model.feature_names;
  out.values.setZero(n, f);
  out.labels.resize(n);
  long unknown = 0;

  for (Index r = 0; r < n; ++r) {
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    out.labels(r) = static_cast<int>(
        std::get<double>(row[static_cast<std::size_t>(label_col)]));
    Index j = 0;
    for (const auto& codec : model.codecs) {
      const Cell& cell = row[static_cast<std::size_t>(codec.column)];
      switch (codec.transform) {
        case EncoderModel::Transform::drop:
          break;
        case EncoderModel::Transform::copy:
          out.values(r, j++) = std::get<double>(cell);
          break;
        case EncoderModel::Transform::hour_weekday: {
          const Timestamp& t = std::get<Timestamp>(cell);
          out.values(r, j++) = static_cast<double>(t.hour);
          out.values(r, j++) = static_cast<double>(t.weekday);
          break;
        }
        case EncoderModel::Transform::binary: {
          const auto& value = std::get<std::string>(cell);
          int k = category_index(codec.categories, value);
          if (k < 0) {
            if (model.config.strict)
              throw DataError("apply_encoder: unknown category '" + value +
                              "' in column '" +
                              model.schema[static_cast<std::size_t>(
                                               codec.column)]
                                  .name +
                              "'");
            ++unknown;
            k = 0;
          }
          out.values(r, j++) = (k == 1) ? 1.0 : 0.0;
          break;
        }
        case EncoderModel::Transform::onehot: {
          const auto& value = std::get<std::string>(cell);
          int k = category_index(codec.categories, value);
          if (k < 0) {
            if (model.config.strict)
              throw DataError("apply_encoder: unknown category '" + value +
                              "' in column '" +
                              model.schema[static_cast<std::size_t>(
                                               codec.column)]
                                  .name +
                              "'");
            ++unknown;
          } else {
            out.values(r, j + k) = 1.0;
          }
          j += static_cast<Index>(codec.categories.size());
          break;
        }
        case EncoderModel::Transform::frequency: {
          const auto& value = std::get<std::string>(cell);
          int k = category_index(codec.categories, value);
          if (k < 0) {
            if (model.config.strict)
              throw DataError("apply_encoder: unknown category '" + value +
                              "' in column '" +
                              model.schema[static_cast<std::size_t>(
                                               codec.column)]
                                  .name +
                              "'");
            ++unknown;
            out.values(r, j++) = 0.0;
          } else {
            out.values(r, j++) = codec.frequencies[static_cast<std::size_t>(k)];
          }
          break;
        }
      }
    }
  }
  if (unknown_category_count) *unknown_category_count = unknown;
  return out;
}

FeatureMatrix encode(const RawTable& table, const EncodingConfig& config) {
  return apply_encoder(table, fit_encoder(table, config));
}

std::pair<FeatureMatrix, ScalerParams> fit_standardize(
    const FeatureMatrix& matrix) {
  if (!matrix.values.allFinite())
    throw DataError("fit_standardize: non-finite input");
  const Index f = matrix.cols();
  const auto n = static_cast<double>(matrix.rows());
  ScalerParams params;
  params.center.resize(f);
  params.scale.resize(f);
  for (Index j = 0; j < f; ++j) {
    const auto col = matrix.values.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      // constant feature
      params.center(j) = col(0);
      params.scale(j) = 1.0;
      continue;
    }
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / n;
    params.center(j) = mean;
    params.scale(j) = std::sqrt(var);
  }
  return {apply_standardize(matrix, params), params};
}

FeatureMatrix apply_standardize(const FeatureMatrix& matrix,
                                const ScalerParams& params) {
  if (params.size() != matrix.cols())
    throw DataError("apply_standardize: scaler has " +
                    std::to_string(params.size()) + " features, matrix has " +
                    std::to_string(matrix.cols()));
  if (!matrix.values.allFinite())
    throw DataError("apply_standardize: non-finite input");
  FeatureMatrix out = matrix;
  out.values = (matrix.values.rowwise() - params.center.transpose())
                   .array()
                   .rowwise() /
               params.scale.transpose().array();
  out.scaler = params;
  return out;
}

}  // namespace clickboost
