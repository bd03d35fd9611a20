#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fasc/state.hpp"

namespace fasc {

double potential_psi(const PreparedDataset& data, const ClusterState& state);
// Throws InvariantError("SF objective requires a Bregman kernel") for
// kernels without a divergence.
double lyapunov(const PreparedDataset& data, const ClusterState& state);

// The quantity the run optimises: L_phi (minimised) for SF with a Bregman
// kernel, Psi (maximised) otherwise.
struct Objective {
  bool minimize = false;
  double value = 0.0;

  bool better_than(const Objective& other) const {
    return minimize ? value < other.value : value > other.value;
  }
};
Objective evaluate_objective(const PreparedDataset& data, const ClusterState& state,
                             const FascConfig& config);

struct MonitorPair {
  double s_centroid = 0.0;
  double s_structure = 0.0;
};

// s_centroid: cosine of the descending-sorted support vectors, shorter one
// zero-padded. s_structure: cosine of the flattened representatives, each
// state's rows taken in its own sorted-support order, missing rows zero.
MonitorPair monitor_similarities(const ClusterState& prev, const ClusterState& cur);

struct TraceRecord {
  int t = 0;
  std::size_t k_active = 0;
  std::size_t outliers = 0;
  double s_centroid = 0.0;
  double s_structure = 0.0;
  double objective = 0.0;
  std::uint64_t state_hash = 0;
  std::size_t structural_edits = 0;
  std::size_t label_changes = 0;

  std::string to_json() const;
};

enum class Termination { kConverged, kLimitCycle, kMaxIterations };
std::string to_string(Termination t);

struct RunResult {
  ClusterState state;  // S*, assignments indexed by dataset position
  std::vector<TraceRecord> trace;
  Termination termination = Termination::kMaxIterations;
  int period = 0;             // limit-cycle period
  int selected_iteration = 0; // iteration S* was taken from
  Objective objective;
  std::vector<double> iteration_seconds;
  std::size_t peak_working_set_bytes = 0;
};

struct RunOptions {
  // Called once per iteration, in order.
  std::function<void(const TraceRecord&)> on_iteration;
};

// Phases 1-3 until convergence, a limit cycle, or max_iterations.
RunResult run(const PreparedDataset& data, const FascConfig& config,
              const RunOptions& options = {});
RunResult run(const Dataset& data, const Kernel& kernel, const FascConfig& config,
              const RunOptions& options = {});

// One iteration of phases 1 and 2 on `state`; returns the trace fields
// that do not need the previous state.
struct IterationStats {
  std::size_t promoted = 0;
  std::size_t merged = 0;
  std::size_t dissolved = 0;
  std::size_t label_changes = 0;
  std::size_t working_set_bytes = 0;

  std::size_t structural_edits() const { return promoted + merged + dissolved; }
};
IterationStats step(const PreparedDataset& data, ClusterState& state,
                    const FascConfig& config);

}  // namespace fasc
