#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fasc/state.hpp"

namespace fasc {

// Row-major |batch| x K score block.
struct AffinityBlock {
  std::vector<std::size_t> positions;
  std::size_t clusters = 0;
  std::vector<double> scores;

  std::span<const double> row(std::size_t r) const {
    return {scores.data() + r * clusters, clusters};
  }
};

// Representatives frozen for one iteration, in the layout the scoring loops
// want: prepared rows, plus a D x K transpose for cosine-family kernels.
class FrozenRepresentatives {
 public:
  FrozenRepresentatives(const PreparedDataset& data, const ClusterState& state);

  std::size_t size() const noexcept { return count_; }
  std::span<const double> prepared(std::size_t j) const {
    return {prepared_.data() + j * dim_, dim_};
  }

  // Scores of one sample against every representative; `scratch` must hold
  // at least dim() doubles for non-cosine kernels.
  void score_row(std::size_t pos, std::span<double> out, std::span<double> scratch) const;
  double score(std::size_t pos, std::size_t j) const;

  std::size_t dim() const noexcept { return dim_; }
  std::size_t bytes() const noexcept;

 private:
  const PreparedDataset* data_;
  std::size_t count_;
  std::size_t dim_;
  std::vector<double> prepared_;    // K x D
  std::vector<double> transposed_;  // D x K, cosine family only
};

AffinityBlock compute_affinities(const PreparedDataset& data,
                                 std::span<const std::size_t> batch,
                                 const ClusterState& state);

// {j : score_j >= tau_intra}, ascending.
std::vector<std::size_t> candidate_set(std::span<const double> scores, double tau_intra);

// Throws InvariantError on empty candidates. Ties go to the lowest index.
std::size_t select_sf(std::span<const double> scores,
                      std::span<const std::size_t> candidates);
std::size_t select_dass(std::span<const double> scores,
                        std::span<const std::size_t> candidates,
                        std::span<const std::size_t> supports, double lambda,
                        SupportWeight phi);

struct AssignmentResult {
  std::vector<int> assignments;
  // Best score over all clusters per position; -inf when K = 0.
  std::vector<double> best_scores;
  std::size_t changed = 0;
  std::size_t working_set_bytes = 0;
};

// Assigns every sample against the frozen state. Batches are contiguous
// runs of canonical order; results do not depend on batch size or worker
// count.
AssignmentResult assign_all(const PreparedDataset& data, const ClusterState& state,
                            const FascConfig& config);

// Fills free capacity with outliers, most novel (lowest best score) first,
// ties by canonical order. Returns the number promoted.
std::size_t promote_outliers(const PreparedDataset& data, ClusterState& state,
                             const FascConfig& config,
                             std::span<const double> best_scores);

}  // namespace fasc
