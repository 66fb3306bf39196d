#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clickboost/types.hpp"

namespace clickboost {

struct ConfusionMatrix {
  std::int64_t tn = 0, fp = 0, fn = 0, tp = 0;

  std::int64_t total() const { return tn + fp + fn + tp; }
  std::int64_t support0() const { return tn + fp; }
  std::int64_t support1() const { return fn + tp; }
};

ConfusionMatrix confusion(const IntVector& preds, const IntVector& labels);

/// Classification metrics with support-weighted averages as the headline
/// numbers (the tables report accuracy = weighted recall on these data).
/// Any 0/0 evaluates to 0 and records a flag.
struct MetricsReport {
  double accuracy = 0.0;
  double precision0 = 0.0, recall0 = 0.0, f1_0 = 0.0;
  double precision1 = 0.0, recall1 = 0.0, f1_1 = 0.0;
  double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
  std::vector<std::string> zero_division_flags;
};

MetricsReport metrics(const ConfusionMatrix& cm);

struct NamedReport {
  std::string name;
  MetricsReport train, test;
};

struct ComparisonRow {
  std::string model;
  MetricsReport train, test;
  double generalization_gap = 0.0;   // train accuracy - test accuracy
  double margin_vs_best_other = 0.0; // test accuracy - best other test accuracy
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
};

// Duplicate model names are a report conflict.
ComparisonReport compare(const std::vector<NamedReport>& reports);

// Table-style text renderings mirroring the report layout.
std::string render_metrics_table(const MetricsReport& train,
                                 const MetricsReport& test);
std::string render_comparison(const ComparisonReport& report);
// Flat delimited rows (model, partition, metric, value), one per weighted
// metric, enough to redraw the comparison chart.
std::string chart_data_csv(const ComparisonReport& report);

std::string report_to_json(const std::string& model_name,
                           const ConfusionMatrix& train_cm,
                           const MetricsReport& train,
                           const ConfusionMatrix& test_cm,
                           const MetricsReport& test);
NamedReport report_from_json(const std::string& text,
                             const std::string& source);
std::string comparison_to_json(const ComparisonReport& report);

}  // namespace clickboost
