#include "fasc/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fasc/error.hpp"
#include "hashing.hpp"
#include <nlohmann/json.hpp>

namespace fasc {
namespace {

constexpr double kStateQuantum = 1e-6;

}  // namespace

std::size_t ClusterState::outliers() const {
  return static_cast<std::size_t>(std::count(assignments.begin(), assignments.end(), kOutlier));
}

std::vector<std::size_t> ClusterState::supports() const {
  std::vector<std::size_t> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(c.support);
  return out;
}

std::string to_string(AssignmentRule rule) {
  return rule == AssignmentRule::kSimilarityFirst ? "sf" : "dass";
}

std::string to_string(SupportWeight phi) {
  switch (phi) {
    case SupportWeight::kLinear: return "linear";
    case SupportWeight::kLog: return "log";
    case SupportWeight::kConstant: return "const";
  }
  return "linear";
}

AssignmentRule parse_rule(std::string_view s) {
  if (s == "sf") return AssignmentRule::kSimilarityFirst;
  if (s == "dass") return AssignmentRule::kDensityAugmented;
  throw ConfigError("rule", "expected sf or dass, got '" + std::string(s) + "'");
}

SupportWeight parse_phi(std::string_view s) {
  if (s == "linear") return SupportWeight::kLinear;
  if (s == "log") return SupportWeight::kLog;
  if (s == "const") return SupportWeight::kConstant;
  throw ConfigError("phi", "expected linear, log or const, got '" + std::string(s) + "'");
}

double apply_phi(SupportWeight phi, std::size_t support) {
  const double n = static_cast<double>(support);
  switch (phi) {
    case SupportWeight::kLinear: return n;
    case SupportWeight::kLog: return std::log1p(n);
    case SupportWeight::kConstant: return 1.0;
  }
  return n;
}

std::size_t CapacitySchedule::at(int iteration) const {
  if (schedule.empty()) return k_max;
  const auto t = static_cast<std::size_t>(std::max(iteration, 0));
  return schedule[std::min(t, schedule.size() - 1)];
}

std::size_t CapacitySchedule::max_capacity() const {
  if (schedule.empty()) return k_max;
  return *std::max_element(schedule.begin(), schedule.end());
}

std::size_t FascConfig::resolved_seed_budget(std::size_t n) const {
  if (seed_budget) return *seed_budget;
  return std::min({capacity.at(0), std::size_t{8}, n});
}

void FascConfig::validate(const Kernel& kernel) const {
  auto check_tau = [&](double tau, const char* field) {
    if (!std::isfinite(tau)) throw ConfigError(field, "must be finite");
    if (kernel.is_bounded() && !(tau > 0.0 && tau <= 1.0)) {
      throw ConfigError(field, "must lie in (0, 1] for a bounded kernel");
    }
  };
  check_tau(tau_intra, "tau_intra");
  check_tau(tau_inter, "tau_inter");
  if (min_support < 1) throw ConfigError("min_support", "must be at least 1");
  if (capacity.k_max < 1 && capacity.schedule.empty()) {
    throw ConfigError("k_max", "must be at least 1");
  }
  for (auto k : capacity.schedule) {
    if (k < 1) throw ConfigError("k_max", "schedule entries must be at least 1");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "must be > 0");
  if (seed_budget && *seed_budget > capacity.at(0)) {
    throw ConfigError("seed_budget", "must not exceed the initial capacity");
  }
  if (batch_size < 1) throw ConfigError("batch_size", "must be at least 1");
  if (max_iterations < 1) throw ConfigError("max_iterations", "must be at least 1");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance", "must be > 0");
  if (workers < 1) throw ConfigError("workers", "must be at least 1");
}

PreparedDataset::PreparedDataset(const Dataset& data, const Kernel& kernel)
    : data_(&data), kernel_(&kernel), canonical_(canonical_order(data)) {
  rank_.resize(canonical_.size());
  for (std::size_t k = 0; k < canonical_.size(); ++k) rank_[canonical_[k]] = k;
  channels_ = kernel.cosine_channels(data.dim);
  if (channels_.empty()) return;
  // Stored in canonical order so full passes read memory sequentially.
  offsets_.reserve(data.size() + 1);
  offsets_.push_back(0);
  for (const auto pos : canonical_) {
    const auto& s = data.spectra[pos];
    normalized_.insert(normalized_.end(), s.entries.begin(), s.entries.end());
    offsets_.push_back(normalized_.size());
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    normalize_channels(std::span<Entry>(normalized_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]),
                       channels_);
  }
}

std::span<const Entry> PreparedDataset::normalized(std::size_t pos) const {
  const std::size_t k = rank_[pos];
  return std::span<const Entry>(normalized_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
}

ClusterState initialize(const PreparedDataset& data, const FascConfig& config) {
  const std::size_t n = data.size();
  if (n == 0) throw ConfigError("input", "empty dataset");
  const std::size_t seeds = config.resolved_seed_budget(n);
  if (seeds > std::min(n, config.capacity.at(0))) {
    throw ConfigError("seed_budget", "must not exceed min(N, K_0)");
  }
  ClusterState state;
  state.assignments.assign(n, kOutlier);
  for (std::size_t k = 0; k < seeds; ++k) {
    const std::size_t pos = data.canonical()[k * n / seeds];
    const Spectrum* member = &data.spectrum(pos);
    Cluster c;
    c.representative = data.kernel().frechet_mean({&member, 1}, data.dim());
    c.support = 1;
    c.born_iteration = 0;
    c.newly_promoted = true;
    state.assignments[pos] = static_cast<int>(state.clusters.size());
    state.clusters.push_back(std::move(c));
  }
  return state;
}

std::vector<std::size_t> support_order(const ClusterState& state) {
  std::vector<std::size_t> order(state.clusters.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = state.clusters[a];
    const auto& cb = state.clusters[b];
    if (ca.support != cb.support) return ca.support > cb.support;
    return ca.representative < cb.representative;
  });
  return order;
}

std::uint64_t state_hash(const ClusterState& state) {
  detail::Hasher h;
  h.add(state.clusters.size());
  for (auto j : support_order(state)) {
    const auto& c = state.clusters[j];
    h.add(c.support);
    h.add(c.representative.size());
    for (double x : c.representative) h.add_quantized(x, kStateQuantum);
  }
  return h.digest();
}

std::string config_to_json(const FascConfig& config) {
  nlohmann::json j;
  j["tau_intra"] = config.tau_intra;
  j["tau_inter"] = config.tau_inter;
  j["min_support"] = config.min_support;
  j["k_max"] = config.capacity.k_max;
  j["k_schedule"] = config.capacity.schedule;
  j["rule"] = to_string(config.rule);
  j["lambda"] = config.lambda;
  j["phi"] = to_string(config.phi);
  if (config.seed_budget) {
    j["seed_budget"] = *config.seed_budget;
  } else {
    j["seed_budget"] = nullptr;
  }
  j["batch_size"] = config.batch_size;
  j["max_iterations"] = config.max_iterations;
  j["tolerance"] = config.tolerance;
  j["rng_seed"] = config.rng_seed;
  j["structural_edits"] = config.structural_edits;
  j["cycle_guard"] = config.cycle_guard;
  return j.dump();
}

}  // namespace fasc
