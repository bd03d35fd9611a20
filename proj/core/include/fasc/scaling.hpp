#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fasc/state.hpp"
#include "fasc/synthetic.hpp"

namespace fasc {

struct ScalingRecord {
  std::size_t n = 0;
  int iterations = 0;
  double total_seconds = 0.0;
  double seconds_per_iteration = 0.0;
  std::size_t working_set_bytes = 0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool valid = false;  // false with fewer than two distinct sizes
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingReport {
  std::vector<ScalingRecord> records;
  LinearFit fit;

  std::string to_csv() const;
  std::string to_json() const;
};

struct SweepOptions {
  std::vector<std::size_t> sizes;
  int repetitions = 3;
  SyntheticSpec data;  // n is overridden per size
  std::string kernel = "cosine";
};

// Runs FASC once per repetition per size on fresh synthetic data and fits
// seconds-per-iteration (median over repetitions, first iteration excluded
// as warm-up) against N. Throws ConfigError on unsorted sizes.
ScalingReport scaling_sweep(const SweepOptions& options, const FascConfig& config);

}  // namespace fasc
