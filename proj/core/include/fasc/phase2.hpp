#pragma once

#include <cstddef>
#include <vector>

#include "fasc/state.hpp"

namespace fasc {

struct MergePlan {
  std::size_t anchor;
  std::vector<std::size_t> absorbed;
  std::size_t moved = 0;  // members relabelled for the first time this pass
};

// Member positions per cluster, in canonical order.
std::vector<std::vector<std::size_t>> memberships(const PreparedDataset& data,
                                                  const ClusterState& state);

// c_j <- frechet_mean(members), n_j <- |members|. Memberless clusters get
// n_j = 0 and keep their previous representative.
void recompute_representatives(const PreparedDataset& data, ClusterState& state);

// Absorbs every live k with sigma(c_j, c_k) >= tau_inter into anchor j,
// anchors by descending support, repeating until no pair qualifies.
// Returns the plans applied, in order.
std::vector<MergePlan> merge_pass(const PreparedDataset& data, ClusterState& state,
                                  double tau_inter);

// Kills clusters with support < Z that are not newly promoted, and every
// empty cluster; members revert to outliers. Clears newly_promoted flags.
// Returns the number dissolved.
std::size_t dissolve_small(ClusterState& state, const FascConfig& config);

// Drops dead clusters and reindexes the rest consecutively, preserving
// order.
void renumber(ClusterState& state);

struct ConsolidationStats {
  std::size_t merged = 0;     // clusters absorbed
  std::size_t dissolved = 0;
  std::size_t touched = 0;    // members moved by merges
};

// Phase 2: recompute, merge, dissolve, renumber.
ConsolidationStats consolidate(const PreparedDataset& data, ClusterState& state,
                               const FascConfig& config);

}  // namespace fasc
