#include "clickboost/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "clickboost/errors.hpp"
#include "clickboost/rng.hpp"

namespace clickboost {
namespace {

// Generator moments, loosely matching the real ad dataset.
constexpr double kTimeMu = 62.0, kTimeSd = 15.0;
constexpr double kAgeMu = 36.0, kAgeSd = 9.0;
constexpr double kIncomeMu = 54000.0, kIncomeSd = 13000.0;
constexpr double kUsageMu = 178.0, kUsageSd = 42.0;

constexpr const char* kRuleText =
    "z_k = (x_k - mu_k) / sd_k for (time, age, income, usage); "
    "score = 1.1*z_time + 0.6*z_age - 1.3*z_usage + 0.8*z_time*z_usage "
    "- 0.5*z_age*z_income + 0.9*tanh(z_income); "
    "clean label = [score > threshold]; label flipped with p = noise_rate";

double clip(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

double score_of(double time, double age, double income, double usage) {
  const double zt = (time - kTimeMu) / kTimeSd;
  const double za = (age - kAgeMu) / kAgeSd;
  const double zi = (income - kIncomeMu) / kIncomeSd;
  const double zu = (usage - kUsageMu) / kUsageSd;
  return 1.1 * zt + 0.6 * za - 1.3 * zu + 0.8 * zt * zu - 0.5 * za * zi +
         0.9 * std::tanh(zi);
}

const char* kTopicAdjectives[] = {"Adaptive",  "Balanced", "Centralized",
                                  "Digitized", "Ergonomic", "Focused",
                                  "Grass-roots", "Horizontal"};
const char* kTopicNouns[] = {"alliance",  "archive",  "budget", "capability",
                             "challenge", "circuit",  "matrix", "paradigm"};
const char* kCities[] = {"Amberport",  "Bryanmouth", "Carterville",
                         "Duranmouth", "East Jill",  "Lake Monica",
                         "New Sarah",  "Port Kevin", "South Amy",
                         "West Steven"};
const char* kCountries[] = {"Albania", "Brazil",  "Canada",  "Denmark",
                            "Egypt",   "France",  "Germany", "Hungary",
                            "India",   "Japan",   "Kenya",   "Luxembourg",
                            "Mexico",  "Norway",  "Oman",    "Peru"};

}  // namespace

SynthResult synthesize(const SynthConfig& config, std::uint64_t seed) {
  if (config.n_rows < 2)
    throw DataError("synthesize: need at least 2 rows");
  if (!(config.noise_rate >= 0.0 && config.noise_rate < 0.5))
    throw DataError("synthesize: noise_rate must lie in [0, 0.5)");
  if (!(config.positive_rate > 0.0 && config.positive_rate < 1.0))
    throw DataError("synthesize: positive_rate must lie in (0, 1)");

  const Index n = config.n_rows;
  Rng rng(seed);

  std::vector<double> time(static_cast<std::size_t>(n)),
      age(static_cast<std::size_t>(n)), income(static_cast<std::size_t>(n)),
      usage(static_cast<std::size_t>(n)), score(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    time[i] = round2(clip(kTimeMu + kTimeSd * rng.normal(), 25.0, 95.0));
    age[i] = std::round(clip(kAgeMu + kAgeSd * rng.normal(), 19.0, 61.0));
    income[i] =
        round2(clip(kIncomeMu + kIncomeSd * rng.normal(), 14000.0, 80000.0));
    usage[i] = round2(clip(kUsageMu + kUsageSd * rng.normal(), 105.0, 270.0));
    score[i] = score_of(time[i], age[i], income[i], usage[i]);
  }

  // Threshold at the empirical quantile that realizes the class balance.
  std::vector<double> sorted = score;
  std::sort(sorted.begin(), sorted.end());
  const auto negatives = static_cast<std::size_t>(clip(
      std::ceil((1.0 - config.positive_rate) * static_cast<double>(n)), 1.0,
      static_cast<double>(n - 1)));
  const double threshold = sorted[negatives - 1];

  SynthResult result;
  result.threshold = threshold;
  result.bayes_accuracy = 1.0 - config.noise_rate;
  result.rule = kRuleText;
  result.clean_labels.resize(static_cast<std::size_t>(n));

  RawTable& table = result.table;
  table.schema = config.full_schema ? ad_full_schema() : table1_schema();

  const std::size_t n_adj = std::size(kTopicAdjectives);
  const std::size_t n_noun = std::size(kTopicNouns);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    const int clean = score[i] > threshold ? 1 : 0;
    result.clean_labels[i] = clean;
    const int label =
        rng.bernoulli(config.noise_rate) ? 1 - clean : clean;

    std::vector<Cell> row;
    row.emplace_back(time[i]);
    row.emplace_back(age[i]);
    row.emplace_back(income[i]);
    row.emplace_back(usage[i]);
    if (config.full_schema) {
      std::string topic = std::string(kTopicAdjectives[rng.uniform_index(n_adj)]) +
                          " " + kTopicNouns[rng.uniform_index(n_noun)] + " " +
                          std::to_string(rng.uniform_index(1000));
      row.emplace_back(std::move(topic));
      row.emplace_back(std::string(kCities[rng.uniform_index(std::size(kCities))]));
      row.emplace_back(rng.bernoulli(0.48) ? 1.0 : 0.0);
      row.emplace_back(
          std::string(kCountries[rng.uniform_index(std::size(kCountries))]));
      char stamp[32];
      std::snprintf(stamp, sizeof(stamp), "%04d-%02d-%02d %02d:%02d:%02d",
                    2016, 1 + static_cast<int>(rng.uniform_index(12)),
                    1 + static_cast<int>(rng.uniform_index(28)),
                    static_cast<int>(rng.uniform_index(24)),
                    static_cast<int>(rng.uniform_index(60)),
                    static_cast<int>(rng.uniform_index(60)));
      row.emplace_back(parse_timestamp(stamp));
    }
    row.emplace_back(static_cast<double>(label));
    table.rows.push_back(std::move(row));
  }
  return result;
}

std::string synth_sidecar_json(const SynthConfig& config, std::uint64_t seed,
                               const SynthResult& result) {
  nlohmann::ordered_json j{
      {"n_rows", config.n_rows},
      {"noise_rate", config.noise_rate},
      {"positive_rate", config.positive_rate},
      {"full_schema", config.full_schema},
      {"seed", seed},
      {"rule", result.rule},
      {"threshold", result.threshold},
      {"bayes_accuracy", result.bayes_accuracy},
  };
  return j.dump(2) + "\n";
}

}  // namespace clickboost
