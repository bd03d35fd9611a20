#pragma once

#include <cstddef>
#include <cstdint>

#include "fasc/spectra.hpp"

namespace fasc {

struct SyntheticSpec {
  std::size_t n = 1000;
  std::size_t dim = 600;
  std::size_t k_true = 10;
  // Relative multiplicative jitter on every peak, in [0, 1).
  double noise = 0.1;
  std::uint64_t seed = 1;
  bool dual_polarity = false;
  // Peaks per direction (per channel when dual_polarity).
  std::size_t peaks = 40;
  // Spurious peaks added to each sample at a random position.
  std::size_t background_peaks = 0;
};

// k_true random sparse non-negative directions; sample i belongs to class
// i mod k_true and is its direction with bounded multiplicative noise.
// Labels hold the class. Throws ConfigError on invalid parameters.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace fasc
