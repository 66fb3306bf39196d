#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clickboost/dataset.hpp"

namespace clickboost {

struct SynthConfig {
  Index n_rows = 1000;
  double noise_rate = 0.1;     // label flip probability, in [0, 0.5)
  double positive_rate = 0.5;  // class balance target
  bool full_schema = false;    // also emit topic/city/gender/country/time
};

/// Synthetic ad-click table whose label is a known function of the numeric
/// features (threshold on a nonlinear score with interactions), flipped at
/// the configured noise rate. Bayes-optimal accuracy is 1 - noise_rate.
struct SynthResult {
  RawTable table;
  std::vector<int> clean_labels;  // pre-noise labels of the generating rule
  double threshold = 0.0;         // score cutoff realizing the class balance
  double bayes_accuracy = 1.0;
  std::string rule;  // the generating function, spelled out
};

SynthResult synthesize(const SynthConfig& config, std::uint64_t seed);

// Sidecar content for cmd_synth: generating rule, threshold, Bayes rate.
std::string synth_sidecar_json(const SynthConfig& config, std::uint64_t seed,
                               const SynthResult& result);

}  // namespace clickboost
