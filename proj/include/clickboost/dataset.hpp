#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "clickboost/types.hpp"

namespace clickboost {

enum class ColumnKind { numeric, categorical, timestamp, label };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
};

// Exactly one label column, unique names.
void validate_schema(const std::vector<ColumnSchema>& schema);

/// Wall-clock time at second resolution; weekday is derived on parse
/// (0 = Monday ... 6 = Sunday).
struct Timestamp {
  int year = 1970, month = 1, day = 1;
  int hour = 0, minute = 0, second = 0;
  int weekday = 0;

  bool operator==(const Timestamp&) const = default;
};

using Cell = std::variant<double, std::string, Timestamp>;

// "YYYY-MM-DD HH:MM[:SS]"; throws DataError on malformed input.
Timestamp parse_timestamp(const std::string& text);

struct RawTable {
  std::vector<ColumnSchema> schema;
  std::vector<std::vector<Cell>> rows;

  Index n_rows() const { return static_cast<Index>(rows.size()); }
  int n_cols() const { return static_cast<int>(schema.size()); }
  int label_column() const;
};

// The two ad-click CSV layouts. table1 is the numeric subset; ad_full is the
// complete column set (topics, city, gender, country, timestamp included).
std::vector<ColumnSchema> table1_schema();
std::vector<ColumnSchema> ad_full_schema();
std::optional<std::vector<ColumnSchema>> schema_by_name(std::string_view name);

RawTable load_csv(const std::filesystem::path& path,
                  const std::vector<ColumnSchema>& schema);
RawTable parse_csv(std::istream& in, const std::vector<ColumnSchema>& schema,
                   std::string_view source_name);
std::string write_csv(const RawTable& table);

struct ColumnStats {
  std::string name;
  double max = 0, min = 0, mean = 0, median = 0;
  double variance = 0;  // population variance
};

struct StatsSummary {
  std::vector<ColumnStats> columns;
};

// Descriptive statistics over every numeric-valued column (label included).
StatsSummary summarize(const RawTable& table);

std::string render_stats_table(const StatsSummary& stats);
std::string stats_to_json(const StatsSummary& stats);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct SplitIndices {
  std::vector<int> train, test;
};

// Train size = round-half-up(N * fraction); seeded shuffle.
SplitIndices split_indices(Index n, const SplitSpec& spec);
std::pair<FeatureMatrix, FeatureMatrix> split(const FeatureMatrix& matrix,
                                              const SplitSpec& spec);
FeatureMatrix take_rows(const FeatureMatrix& matrix,
                        const std::vector<int>& rows);

}  // namespace clickboost
