#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fasc/kernels.hpp"
#include "fasc/spectra.hpp"

namespace fasc {

inline constexpr int kOutlier = -1;

struct Cluster {
  Vector representative;
  std::size_t support = 0;
  int born_iteration = 0;
  // Exempt from minimum-support dissolution until the end of the current
  // consolidation.
  bool newly_promoted = false;
  // Cleared by merging and dissolution; renumber() drops dead clusters.
  bool alive = true;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

// Assignments are indexed by dataset position; kOutlier marks provisional
// outliers.
struct ClusterState {
  std::vector<Cluster> clusters;
  std::vector<int> assignments;
  int iteration = 0;

  std::size_t active() const noexcept { return clusters.size(); }
  std::size_t outliers() const;
  std::vector<std::size_t> supports() const;

  friend bool operator==(const ClusterState&, const ClusterState&) = default;
};

enum class AssignmentRule { kSimilarityFirst, kDensityAugmented };
enum class SupportWeight { kLinear, kLog, kConstant };

std::string to_string(AssignmentRule rule);
std::string to_string(SupportWeight phi);
AssignmentRule parse_rule(std::string_view s);
SupportWeight parse_phi(std::string_view s);
double apply_phi(SupportWeight phi, std::size_t support);

// Per-iteration capacity K_t. An empty schedule means K_t = k_max for all
// t; otherwise K_t = schedule[min(t, size - 1)].
struct CapacitySchedule {
  std::size_t k_max = 50;
  std::vector<std::size_t> schedule;

  std::size_t at(int iteration) const;
  std::size_t max_capacity() const;
};

struct FascConfig {
  double tau_intra = 0.7;
  double tau_inter = 0.7;
  std::size_t min_support = 1;
  CapacitySchedule capacity;
  AssignmentRule rule = AssignmentRule::kDensityAugmented;
  double lambda = 1.0;
  SupportWeight phi = SupportWeight::kLinear;
  // Unset means min(k_max, 8).
  std::optional<std::size_t> seed_budget;
  std::size_t batch_size = 4096;
  int max_iterations = 100;
  double tolerance = 1e-3;
  // Only baselines and synthetic data draw random numbers.
  std::uint64_t rng_seed = 0;
  std::size_t workers = 1;
  // Off: promotion, merging and dissolution are skipped.
  bool structural_edits = true;
  bool cycle_guard = true;

  std::size_t resolved_seed_budget(std::size_t n) const;
  // Throws ConfigError naming the offending field.
  void validate(const Kernel& kernel) const;
};

// A dataset bound to a kernel: canonical order plus, for cosine-family
// kernels, channel-normalised rows ready for the sparse scoring path.
class PreparedDataset {
 public:
  PreparedDataset(const Dataset& data, const Kernel& kernel);

  const Dataset& data() const noexcept { return *data_; }
  const Kernel& kernel() const noexcept { return *kernel_; }
  std::size_t size() const noexcept { return data_->size(); }
  std::size_t dim() const noexcept { return data_->dim; }

  // canonical()[k] is the dataset position holding the k-th sample in
  // canonical order; rank()[pos] is the inverse.
  const std::vector<std::size_t>& canonical() const noexcept { return canonical_; }
  const std::vector<std::size_t>& rank() const noexcept { return rank_; }

  bool cosine_family() const noexcept { return !channels_.empty(); }
  const std::vector<ChannelRange>& channels() const noexcept { return channels_; }
  // Channel-normalised entries; only valid for cosine-family kernels.
  std::span<const Entry> normalized(std::size_t pos) const;

  const Spectrum& spectrum(std::size_t pos) const { return data_->spectra[pos]; }

 private:
  const Dataset* data_;
  const Kernel* kernel_;
  std::vector<std::size_t> canonical_;
  std::vector<std::size_t> rank_;
  std::vector<ChannelRange> channels_;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> normalized_;
};

// Seeds at canonical positions floor(k * N / S0), k = 0..S0-1. Seeds are
// flagged newly promoted so the first consolidation does not dissolve them.
ClusterState initialize(const PreparedDataset& data, const FascConfig& config);

// Digest of the sorted support vector and the representatives (quantised
// at 1e-6) in sorted-support order. Assignments are not hashed.
std::uint64_t state_hash(const ClusterState& state);

// Indices of clusters by descending support, ties by lexicographic
// representative order (then index).
std::vector<std::size_t> support_order(const ClusterState& state);

// Checkpoint: one JSON header line followed by the little-endian K x D
// representative matrix (float64) and N assignments (int32).
struct Checkpoint {
  ClusterState state;
  std::size_t dim = 0;
  std::string kernel;
  std::string config_json;  // opaque, echoed back on load
  std::vector<SampleId> ids;  // per dataset position

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string config_to_json(const FascConfig& config);

}  // namespace fasc
