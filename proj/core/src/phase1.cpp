#include "fasc/phase1.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <thread>

#include "fasc/error.hpp"

namespace fasc {
namespace {

double clamp_unit(double s) { return std::clamp(s, -1.0, 1.0); }

}  // namespace

FrozenRepresentatives::FrozenRepresentatives(const PreparedDataset& data,
                                             const ClusterState& state)
    : data_(&data), count_(state.clusters.size()), dim_(data.dim()) {
  prepared_.resize(count_ * dim_);
  for (std::size_t j = 0; j < count_; ++j) {
    const auto& rep = state.clusters[j].representative;
    if (rep.size() != dim_) throw InvariantError("representative dimension mismatch");
    auto row = std::span<double>(prepared_).subspan(j * dim_, dim_);
    std::copy(rep.begin(), rep.end(), row.begin());
    data.kernel().prepare(row);
  }
  if (data.cosine_family()) {
    transposed_.resize(dim_ * count_);
    for (std::size_t j = 0; j < count_; ++j) {
      for (std::size_t d = 0; d < dim_; ++d) transposed_[d * count_ + j] = prepared_[j * dim_ + d];
    }
  }
}

std::size_t FrozenRepresentatives::bytes() const noexcept {
  return (prepared_.size() + transposed_.size()) * sizeof(double);
}

void FrozenRepresentatives::score_row(std::size_t pos, std::span<double> out,
                                      std::span<double> scratch) const {
  const std::size_t k = count_;
  if (data_->cosine_family()) {
    const auto entries = data_->normalized(pos);
    const auto& channels = data_->channels();
    std::size_t e = 0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      double* acc = c == 0 ? out.data() : scratch.data();
      std::fill(acc, acc + k, 0.0);
      while (e < entries.size() && entries[e].dim < channels[c].end) {
        const double v = entries[e].value;
        const double* col = transposed_.data() + std::size_t{entries[e].dim} * k;
        for (std::size_t j = 0; j < k; ++j) acc[j] += v * col[j];
        ++e;
      }
      if (c == 0) {
        for (std::size_t j = 0; j < k; ++j) out[j] = clamp_unit(out[j]);
      } else {
        for (std::size_t j = 0; j < k; ++j) out[j] = std::min(out[j], clamp_unit(acc[j]));
      }
    }
    return;
  }
  const auto& spectrum = data_->spectrum(pos);
  auto dense = scratch.first(dim_);
  for (const auto& en : spectrum.entries) dense[en.dim] = en.value;
  data_->kernel().prepare(dense);
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = data_->kernel().prepared_similarity(dense, prepared(j));
  }
  std::fill(dense.begin(), dense.end(), 0.0);
}

double FrozenRepresentatives::score(std::size_t pos, std::size_t j) const {
  if (data_->cosine_family()) {
    const auto entries = data_->normalized(pos);
    const auto rep = prepared(j);
    double result = 0.0;
    std::size_t e = 0;
    const auto& channels = data_->channels();
    for (std::size_t c = 0; c < channels.size(); ++c) {
      double acc = 0.0;
      while (e < entries.size() && entries[e].dim < channels[c].end) {
        acc += entries[e].value * rep[entries[e].dim];
        ++e;
      }
      result = c == 0 ? clamp_unit(acc) : std::min(result, clamp_unit(acc));
    }
    return result;
  }
  Vector dense = data_->spectrum(pos).to_dense(dim_);
  data_->kernel().prepare(dense);
  return data_->kernel().prepared_similarity(dense, prepared(j));
}

AffinityBlock compute_affinities(const PreparedDataset& data,
                                 std::span<const std::size_t> batch,
                                 const ClusterState& state) {
  const FrozenRepresentatives reps(data, state);
  AffinityBlock block;
  block.positions.assign(batch.begin(), batch.end());
  block.clusters = reps.size();
  block.scores.assign(batch.size() * reps.size(), 0.0);
  std::vector<double> scratch(std::max(data.dim(), reps.size()));
  for (std::size_t r = 0; r < batch.size(); ++r) {
    reps.score_row(batch[r],
                   std::span<double>(block.scores).subspan(r * reps.size(), reps.size()),
                   scratch);
  }
  return block;
}

std::vector<std::size_t> candidate_set(std::span<const double> scores, double tau_intra) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] >= tau_intra) out.push_back(j);
  }
  return out;
}

std::size_t select_sf(std::span<const double> scores,
                      std::span<const std::size_t> candidates) {
  if (candidates.empty()) throw InvariantError("select_sf on an empty candidate set");
  std::size_t best = candidates.front();
  for (auto j : candidates.subspan(1)) {
    if (scores[j] > scores[best] || (scores[j] == scores[best] && j < best)) best = j;
  }
  return best;
}

std::size_t select_dass(std::span<const double> scores,
                        std::span<const std::size_t> candidates,
                        std::span<const std::size_t> supports, double lambda,
                        SupportWeight phi) {
  if (candidates.empty()) throw InvariantError("select_dass on an empty candidate set");
  auto value = [&](std::size_t j) { return scores[j] + lambda * apply_phi(phi, supports[j]); };
  std::size_t best = candidates.front();
  double best_value = value(best);
  for (auto j : candidates.subspan(1)) {
    const double v = value(j);
    if (v > best_value || (v == best_value && j < best)) {
      best = j;
      best_value = v;
    }
  }
  return best;
}

AssignmentResult assign_all(const PreparedDataset& data, const ClusterState& state,
                            const FascConfig& config) {
  const std::size_t n = data.size();
  const FrozenRepresentatives reps(data, state);
  const std::size_t k = reps.size();
  const auto supports = state.supports();
  const std::size_t batch = std::max<std::size_t>(1, std::min(config.batch_size, n));
  const std::size_t batches = n == 0 ? 0 : (n + batch - 1) / batch;
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, batches));

  AssignmentResult result;
  result.assignments.assign(n, kOutlier);
  result.best_scores.assign(n, -std::numeric_limits<double>::infinity());
  const std::size_t scratch_size = std::max(data.dim(), k);

  auto work = [&](std::size_t worker) {
    std::vector<double> block(batch * k);
    std::vector<double> scratch(scratch_size, 0.0);
    std::vector<std::size_t> candidates;
    candidates.reserve(k);
    for (std::size_t b = worker; b < batches; b += workers) {
      const std::size_t first = b * batch;
      const std::size_t last = std::min(n, first + batch);
      for (std::size_t r = 0; first + r < last; ++r) {
        const std::size_t pos = data.canonical()[first + r];
        auto row = std::span<double>(block).subspan(r * k, k);
        if (k > 0) reps.score_row(pos, row, scratch);
        double best = -std::numeric_limits<double>::infinity();
        candidates.clear();
        for (std::size_t j = 0; j < k; ++j) {
          best = std::max(best, row[j]);
          if (row[j] >= config.tau_intra) candidates.push_back(j);
        }
        result.best_scores[pos] = best;
        if (candidates.empty()) continue;
        const std::size_t chosen =
            config.rule == AssignmentRule::kSimilarityFirst
                ? select_sf(row, candidates)
                : select_dass(row, candidates, supports, config.lambda, config.phi);
        result.assignments[pos] = static_cast<int>(chosen);
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (result.assignments[i] != state.assignments[i]) ++result.changed;
  }
  result.working_set_bytes =
      reps.bytes() + workers * (batch * k + scratch_size) * sizeof(double);
  return result;
}

std::size_t promote_outliers(const PreparedDataset& data, ClusterState& state,
                             const FascConfig& config,
                             std::span<const double> best_scores) {
  if (!config.structural_edits) return 0;
  const std::size_t capacity = config.capacity.at(state.iteration);
  if (state.active() >= capacity) return 0;
  std::vector<std::size_t> pool;
  for (std::size_t pos = 0; pos < state.assignments.size(); ++pos) {
    if (state.assignments[pos] == kOutlier) pool.push_back(pos);
  }
  const std::size_t take = std::min(capacity - state.active(), pool.size());
  if (take == 0) return 0;
  const auto& rank = data.rank();
  const auto novel_first = [&](std::size_t a, std::size_t b) {
    if (best_scores[a] != best_scores[b]) return best_scores[a] < best_scores[b];
    return rank[a] < rank[b];
  };
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(),
                    novel_first);
  for (std::size_t p = 0; p < take; ++p) {
    const std::size_t pos = pool[p];
    const Spectrum* member = &data.spectrum(pos);
    Cluster c;
    c.representative = data.kernel().frechet_mean({&member, 1}, data.dim());
    c.support = 1;
    c.born_iteration = state.iteration;
    c.newly_promoted = true;
    state.assignments[pos] = static_cast<int>(state.clusters.size());
    state.clusters.push_back(std::move(c));
  }
  return take;
}

}  // namespace fasc
