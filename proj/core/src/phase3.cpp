#include "fasc/phase3.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <cstdio>
#include <unordered_map>

#include "fasc/error.hpp"
#include "fasc/phase1.hpp"
#include "fasc/phase2.hpp"
#include <nlohmann/json.hpp>

namespace fasc {

double potential_psi(const PreparedDataset& data, const ClusterState& state) {
  const FrozenRepresentatives reps(data, state);
  double sim = 0.0;
  for (auto pos : data.canonical()) {
    const int id = state.assignments[pos];
    if (id == kOutlier) continue;
    sim += reps.score(pos, static_cast<std::size_t>(id));
  }
  double pairs = 0.0;
  for (const auto& c : state.clusters) {
    const double n = static_cast<double>(c.support);
    pairs += n * (n - 1.0) / 2.0;
  }
  return sim + pairs;
}

double lyapunov(const PreparedDataset& data, const ClusterState& state) {
  const Kernel& kernel = data.kernel();
  if (!kernel.has_bregman()) throw InvariantError("SF objective requires a Bregman kernel");
  double total = 0.0;
  Vector dense(data.dim(), 0.0);
  for (auto pos : data.canonical()) {
    const int id = state.assignments[pos];
    if (id == kOutlier) continue;
    const auto& s = data.spectrum(pos);
    for (const auto& e : s.entries) dense[e.dim] = e.value;
    total += kernel.divergence(dense, state.clusters[static_cast<std::size_t>(id)].representative);
    for (const auto& e : s.entries) dense[e.dim] = 0.0;
  }
  return total;
}

Objective evaluate_objective(const PreparedDataset& data, const ClusterState& state,
                             const FascConfig& config) {
  if (config.rule == AssignmentRule::kSimilarityFirst && data.kernel().has_bregman()) {
    return {true, lyapunov(data, state)};
  }
  return {false, potential_psi(data, state)};
}

MonitorPair monitor_similarities(const ClusterState& prev, const ClusterState& cur) {
  if (prev.clusters.empty() || cur.clusters.empty()) return {};
  const std::size_t k = std::max(prev.active(), cur.active());

  auto sorted_supports = [k](const ClusterState& s) {
    std::vector<double> v;
    for (auto n : s.supports()) v.push_back(static_cast<double>(n));
    std::sort(v.begin(), v.end(), std::greater<>());
    v.resize(k, 0.0);
    return v;
  };
  MonitorPair out;
  out.s_centroid = cosine(sorted_supports(prev), sorted_supports(cur));

  const std::size_t dim = cur.clusters.front().representative.size();
  auto flattened = [k, dim](const ClusterState& s) {
    std::vector<double> v(k * dim, 0.0);
    const auto order = support_order(s);
    for (std::size_t r = 0; r < order.size(); ++r) {
      const auto& rep = s.clusters[order[r]].representative;
      std::copy(rep.begin(), rep.end(), v.begin() + static_cast<std::ptrdiff_t>(r * dim));
    }
    return v;
  };
  if (prev.clusters.front().representative.size() != dim) {
    throw InvariantError("monitor states disagree on dimension");
  }
  out.s_structure = cosine(flattened(prev), flattened(cur));
  return out;
}

std::string TraceRecord::to_json() const {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(state_hash));
  nlohmann::ordered_json j;
  j["t"] = t;
  j["K_active"] = k_active;
  j["outlier_count"] = outliers;
  j["s_centroid"] = s_centroid;
  j["s_structure"] = s_structure;
  j["objective"] = objective;
  j["state_hash"] = hash;
  j["structural_edits"] = structural_edits;
  j["label_changes"] = label_changes;
  return j.dump();
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kLimitCycle: return "limit_cycle";
    case Termination::kMaxIterations: return "max_iterations";
  }
  return "max_iterations";
}

IterationStats step(const PreparedDataset& data, ClusterState& state, const FascConfig& config) {
  IterationStats stats;
  ++state.iteration;
  auto assigned = assign_all(data, state, config);
  state.assignments = std::move(assigned.assignments);
  stats.label_changes = assigned.changed;
  stats.working_set_bytes = assigned.working_set_bytes;
  stats.promoted = promote_outliers(data, state, config, assigned.best_scores);
  const auto cons = consolidate(data, state, config);
  stats.merged = cons.merged;
  stats.dissolved = cons.dissolved;
  return stats;
}

namespace {

struct Iterate {
  ClusterState state;
  TraceRecord record;
  Objective objective;
};

}  // namespace

RunResult run(const PreparedDataset& data, const FascConfig& config, const RunOptions& options) {
  config.validate(data.kernel());
  RunResult result;
  ClusterState state = initialize(data, config);
  ClusterState prev = state;
  std::unordered_map<std::uint64_t, int> first_seen;
  std::optional<Iterate> best;

  auto advance = [&]() {
    const auto start = std::chrono::steady_clock::now();
    const auto stats = step(data, state, config);
    const auto stop = std::chrono::steady_clock::now();
    result.iteration_seconds.push_back(std::chrono::duration<double>(stop - start).count());
    result.peak_working_set_bytes = std::max(result.peak_working_set_bytes, stats.working_set_bytes);

    Iterate it;
    it.objective = evaluate_objective(data, state, config);
    const auto monitors = monitor_similarities(prev, state);
    auto& rec = it.record;
    rec.t = state.iteration;
    rec.k_active = state.active();
    rec.outliers = state.outliers();
    rec.s_centroid = monitors.s_centroid;
    rec.s_structure = monitors.s_structure;
    rec.objective = it.objective.value;
    rec.state_hash = state_hash(state);
    rec.structural_edits = stats.structural_edits();
    rec.label_changes = stats.label_changes;
    result.trace.push_back(rec);
    if (options.on_iteration) options.on_iteration(rec);
    prev = state;
    it.state = state;
    return it;
  };

  auto finish = [&](Iterate&& chosen, Termination how) {
    result.termination = how;
    result.selected_iteration = chosen.record.t;
    result.objective = chosen.objective;
    result.state = std::move(chosen.state);
    return std::move(result);
  };

  for (int t = 1; t <= config.max_iterations; ++t) {
    Iterate it = advance();
    const auto& rec = it.record;
    if (!best || it.objective.better_than(best->objective)) best = it;

    const bool converged = 1.0 - rec.s_centroid < config.tolerance &&
                           1.0 - rec.s_structure < config.tolerance &&
                           rec.structural_edits == 0 && rec.label_changes == 0;
    if (converged) return finish(std::move(it), Termination::kConverged);

    if (config.cycle_guard) {
      const auto seen = first_seen.find(rec.state_hash);
      if (seen != first_seen.end()) {
        const int period = t - seen->second;
        // Replay one full period and keep the best state on it.
        Iterate chosen = std::move(it);
        for (int r = 1; r < period; ++r) {
          Iterate next = advance();
          if (next.objective.better_than(chosen.objective)) chosen = std::move(next);
        }
        advance();
        result.period = period;
        return finish(std::move(chosen), Termination::kLimitCycle);
      }
      first_seen.emplace(rec.state_hash, t);
    }
  }
  return finish(std::move(*best), Termination::kMaxIterations);
}

RunResult run(const Dataset& data, const Kernel& kernel, const FascConfig& config,
              const RunOptions& options) {
  const PreparedDataset prepared(data, kernel);
  return run(prepared, config, options);
}

}  // namespace fasc
