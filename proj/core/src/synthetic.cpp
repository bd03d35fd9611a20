#include "fasc/synthetic.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "fasc/error.hpp"

namespace fasc {
namespace {

// `count` distinct values from [begin, end), ascending (Floyd's algorithm).
std::vector<std::uint32_t> pick_dims(std::mt19937_64& rng, std::size_t begin, std::size_t end,
                                     std::size_t count) {
  std::vector<std::uint32_t> out;
  const std::size_t range = end - begin;
  for (std::size_t j = range - count; j < range; ++j) {
    const auto t = static_cast<std::uint32_t>(
        begin + std::uniform_int_distribution<std::size_t>(0, j)(rng));
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(static_cast<std::uint32_t>(begin + j));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.k_true == 0) throw ConfigError("k_true", "must be positive");
  if (spec.k_true > spec.n) throw ConfigError("k_true", "must not exceed n");
  if (spec.dim == 0) throw ConfigError("dim", "must be positive");
  if (!(spec.noise >= 0.0 && spec.noise < 1.0)) throw ConfigError("noise", "must lie in [0, 1)");
  if (spec.dual_polarity && spec.dim < 2) throw ConfigError("dim", "dual polarity needs D >= 2");
  const std::size_t channel_width = spec.dual_polarity ? spec.dim / 2 : spec.dim;
  if (spec.peaks == 0 || spec.peaks > channel_width) {
    throw ConfigError("peaks", "must lie in [1, " + std::to_string(channel_width) + "]");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> intensity(0.1, 1.0);
  std::vector<std::vector<Entry>> directions(spec.k_true);
  for (auto& dir : directions) {
    std::vector<std::uint32_t> dims;
    if (spec.dual_polarity) {
      dims = pick_dims(rng, 0, spec.dim / 2, spec.peaks);
      const auto neg = pick_dims(rng, spec.dim / 2, spec.dim, spec.peaks);
      dims.insert(dims.end(), neg.begin(), neg.end());
    } else {
      dims = pick_dims(rng, 0, spec.dim, spec.peaks);
    }
    for (auto d : dims) dir.push_back({d, intensity(rng)});
  }

  Dataset data;
  data.dim = spec.dim;
  if (spec.dual_polarity) data.split = PolaritySplit{spec.dim / 2};
  data.spectra.reserve(spec.n);
  std::vector<int> labels(spec.n);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_dim(0, spec.dim - 1);
  std::uniform_real_distribution<double> faint(0.01, 0.1);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::size_t c = i % spec.k_true;
    labels[i] = static_cast<int>(c);
    std::map<std::uint32_t, double> peaks;
    for (const auto& e : directions[c]) {
      peaks[e.dim] = e.value * (1.0 + spec.noise * jitter(rng));
    }
    for (std::size_t b = 0; b < spec.background_peaks; ++b) {
      peaks[static_cast<std::uint32_t>(any_dim(rng))] += faint(rng);
    }
    Spectrum s;
    s.id = i;
    for (const auto& [d, v] : peaks) {
      if (v > 0.0) s.entries.push_back({d, v});
    }
    data.spectra.push_back(std::move(s));
  }
  data.labels = std::move(labels);
  return data;
}

}  // namespace fasc
