#pragma once

#include <stdexcept>

namespace clickboost {

// Error classes map one-to-one onto the CLI exit codes (see tools/main.cpp):
// DataError -> 2, TrainError -> 3, FingerprintError -> 4, ReportError -> 5.

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FingerprintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace clickboost
