#include "fasc/phase2.hpp"

#include <algorithm>

#include "fasc/error.hpp"

namespace fasc {
namespace {

Vector mean_of(const PreparedDataset& data, const std::vector<std::size_t>& members) {
  std::vector<const Spectrum*> ptrs;
  ptrs.reserve(members.size());
  for (auto pos : members) ptrs.push_back(&data.spectrum(pos));
  return data.kernel().frechet_mean(ptrs, data.dim());
}

bool live(const Cluster& c) { return c.alive && c.support > 0; }

}  // namespace

std::vector<std::vector<std::size_t>> memberships(const PreparedDataset& data,
                                                  const ClusterState& state) {
  std::vector<std::vector<std::size_t>> out(state.clusters.size());
  for (auto pos : data.canonical()) {
    const int id = state.assignments[pos];
    if (id == kOutlier) continue;
    if (id < 0 || static_cast<std::size_t>(id) >= out.size()) {
      throw InvariantError("assignment refers to a missing cluster");
    }
    out[static_cast<std::size_t>(id)].push_back(pos);
  }
  return out;
}

void recompute_representatives(const PreparedDataset& data, ClusterState& state) {
  const auto members = memberships(data, state);
  for (std::size_t j = 0; j < state.clusters.size(); ++j) {
    auto& c = state.clusters[j];
    c.support = members[j].size();
    if (!members[j].empty()) c.representative = mean_of(data, members[j]);
  }
}

std::vector<MergePlan> merge_pass(const PreparedDataset& data, ClusterState& state,
                                  double tau_inter) {
  const Kernel& kernel = data.kernel();
  auto members = memberships(data, state);
  const std::size_t k = state.clusters.size();
  std::vector<Vector> prepared(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (live(state.clusters[j])) prepared[j] = kernel.prepared(state.clusters[j].representative);
  }
  const auto& rank = data.rank();
  std::vector<MergePlan> plans;
  std::vector<bool> moved(state.assignments.size(), false);
  bool merged_any = true;
  while (merged_any) {
    merged_any = false;
    std::vector<std::size_t> anchors;
    for (std::size_t j = 0; j < k; ++j) {
      if (live(state.clusters[j])) anchors.push_back(j);
    }
    std::stable_sort(anchors.begin(), anchors.end(), [&](std::size_t a, std::size_t b) {
      return state.clusters[a].support > state.clusters[b].support;
    });
    for (auto j : anchors) {
      if (!live(state.clusters[j])) continue;
      MergePlan plan{j, {}};
      for (std::size_t other = 0; other < k; ++other) {
        if (other == j || !live(state.clusters[other])) continue;
        if (kernel.prepared_similarity(prepared[j], prepared[other]) >= tau_inter) {
          plan.absorbed.push_back(other);
        }
      }
      if (plan.absorbed.empty()) continue;
      auto& anchor_members = members[j];
      for (auto other : plan.absorbed) {
        for (auto pos : members[other]) {
          state.assignments[pos] = static_cast<int>(j);
          if (!moved[pos]) {
            moved[pos] = true;
            ++plan.moved;
          }
        }
        anchor_members.insert(anchor_members.end(), members[other].begin(), members[other].end());
        members[other].clear();
        auto& dead = state.clusters[other];
        dead.alive = false;
        dead.support = 0;
        prepared[other].clear();
      }
      std::sort(anchor_members.begin(), anchor_members.end(),
                [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
      auto& anchor = state.clusters[j];
      anchor.representative = mean_of(data, anchor_members);
      anchor.support = anchor_members.size();
      anchor.newly_promoted = false;
      prepared[j] = kernel.prepared(anchor.representative);
      plans.push_back(std::move(plan));
      merged_any = true;
    }
  }
  return plans;
}

std::size_t dissolve_small(ClusterState& state, const FascConfig& config) {
  std::size_t dissolved = 0;
  std::vector<bool> killed(state.clusters.size(), false);
  for (std::size_t j = 0; j < state.clusters.size(); ++j) {
    auto& c = state.clusters[j];
    if (!c.alive) continue;
    if (c.support == 0 || (c.support < config.min_support && !c.newly_promoted)) {
      c.alive = false;
      c.support = 0;
      killed[j] = true;
      ++dissolved;
    }
  }
  if (dissolved > 0) {
    for (int& a : state.assignments) {
      if (a != kOutlier && killed[static_cast<std::size_t>(a)]) a = kOutlier;
    }
  }
  for (auto& c : state.clusters) c.newly_promoted = false;
  return dissolved;
}

void renumber(ClusterState& state) {
  std::vector<int> remap(state.clusters.size(), kOutlier);
  std::vector<Cluster> kept;
  kept.reserve(state.clusters.size());
  for (std::size_t j = 0; j < state.clusters.size(); ++j) {
    if (!state.clusters[j].alive) continue;
    remap[j] = static_cast<int>(kept.size());
    kept.push_back(std::move(state.clusters[j]));
  }
  for (int& a : state.assignments) {
    if (a == kOutlier) continue;
    const int mapped = remap[static_cast<std::size_t>(a)];
    if (mapped == kOutlier) throw InvariantError("sample assigned to a dead cluster");
    a = mapped;
  }
  state.clusters = std::move(kept);
}

ConsolidationStats consolidate(const PreparedDataset& data, ClusterState& state,
                               const FascConfig& config) {
  ConsolidationStats stats;
  recompute_representatives(data, state);
  if (config.structural_edits) {
    for (const auto& plan : merge_pass(data, state, config.tau_inter)) {
      stats.merged += plan.absorbed.size();
      stats.touched += plan.moved;
    }
    stats.dissolved = dissolve_small(state, config);
  } else {
    for (auto& c : state.clusters) c.newly_promoted = false;
  }
  renumber(state);
  return stats;
}

}  // namespace fasc
