#include "fasc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "fasc/error.hpp"
#include "fasc/state.hpp"

namespace fasc {
namespace {

double l2_norm(std::span<const double> v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss);
}

void normalize_dense(Vector& v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  if (ss == 0.0) return;
  const double inv = 1.0 / std::sqrt(ss);
  for (double& x : v) x *= inv;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Unit-norm sparse rows, one per dataset position.
struct UnitRows {
  std::vector<std::size_t> offsets{0};
  std::vector<Entry> entries;

  explicit UnitRows(const Dataset& data) {
    const ChannelRange whole{0, data.dim};
    for (const auto& s : data.spectra) {
      entries.insert(entries.end(), s.entries.begin(), s.entries.end());
      normalize_channels(std::span<Entry>(entries).subspan(offsets.back()),
                         std::span<const ChannelRange>(&whole, 1));
      offsets.push_back(entries.size());
    }
  }

  std::span<const Entry> row(std::size_t pos) const {
    return {entries.data() + offsets[pos], offsets[pos + 1] - offsets[pos]};
  }
};

double sparse_dot(std::span<const Entry> x, std::span<const double> c) {
  double s = 0.0;
  for (const auto& e : x) s += e.value * c[e.dim];
  return s;
}

}  // namespace

Art2aResult art2a_run(const Dataset& data, std::span<const std::size_t> order,
                      const Art2aOptions& options) {
  if (!(options.vigilance > 0.0 && options.vigilance <= 1.0)) {
    throw ConfigError("vigilance", "must lie in (0, 1]");
  }
  if (!(options.eta > 0.0 && options.eta <= 1.0)) throw ConfigError("eta", "must lie in (0, 1]");
  if (options.k_max == 0) throw ConfigError("k_max", "must be positive");
  if (options.epochs < 1) throw ConfigError("epochs", "must be at least 1");
  if (order.size() != data.size()) throw ConfigError("order", "must list every position once");

  Art2aResult result;
  result.assignments.assign(data.size(), kOutlier);
  Vector x(data.dim, 0.0);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    result.skipped = 0;
    for (auto pos : order) {
      const auto& s = data.spectra.at(pos);
      std::fill(x.begin(), x.end(), 0.0);
      for (const auto& e : s.entries) x[e.dim] = e.value;
      if (l2_norm(x) == 0.0) {
        ++result.skipped;
        continue;
      }
      normalize_dense(x);

      std::size_t best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < result.prototypes.size(); ++j) {
        const double score = dot(result.prototypes[j], x);
        if (score > best_score) {
          best_score = score;
          best = j;
        }
      }
      if (!result.prototypes.empty() && best_score >= options.vigilance) {
        auto& p = result.prototypes[best];
        for (std::size_t d = 0; d < p.size(); ++d) {
          p[d] = (1.0 - options.eta) * p[d] + options.eta * x[d];
        }
        normalize_dense(p);
      } else if (result.prototypes.size() < options.k_max) {
        best = result.prototypes.size();
        result.prototypes.push_back(x);
      }
      result.assignments[pos] = static_cast<int>(best);
    }
  }
  result.supports.assign(result.prototypes.size(), 0);
  for (int a : result.assignments) {
    if (a != kOutlier) ++result.supports[static_cast<std::size_t>(a)];
  }
  return result;
}

KMeansResult spherical_kmeans(const Dataset& data, const KMeansOptions& options) {
  const std::size_t n = data.size();
  const std::size_t k = options.k;
  if (k == 0) throw ConfigError("k", "must be positive");
  if (k > n) throw ConfigError("k", "K = " + std::to_string(k) + " exceeds N = " + std::to_string(n));
  if (options.max_iterations < 1) throw ConfigError("max_iterations", "must be at least 1");
  const std::size_t dim = data.dim;
  const UnitRows rows(data);
  const auto order = canonical_order(data);

  auto dense_row = [&](std::size_t pos) {
    Vector v(dim, 0.0);
    for (const auto& e : rows.row(pos)) v[e.dim] = e.value;
    return v;
  };

  // Seeding: D^2 weighting, which for unit vectors is proportional to
  // 1 - cos.
  std::mt19937_64 rng(options.seed);
  KMeansResult result;
  std::vector<double> nearest(n, -std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  auto add_center = [&](std::size_t pos) {
    chosen[pos] = 1;
    result.centroids.push_back(dense_row(pos));
    const auto& c = result.centroids.back();
    for (auto p : order) nearest[p] = std::max(nearest[p], sparse_dot(rows.row(p), c));
  };
  add_center(order[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
  while (result.centroids.size() < k) {
    double total = 0.0;
    for (auto p : order) {
      if (!chosen[p]) total += std::max(0.0, 1.0 - nearest[p]);
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      for (auto p : order) {
        if (chosen[p]) continue;
        const double w = std::max(0.0, 1.0 - nearest[p]);
        if (w == 0.0) continue;
        pick = p;
        acc += w;
        if (acc > u) break;
      }
    }
    if (pick == n) {
      for (auto p : order) {
        if (!chosen[p]) {
          pick = p;
          break;
        }
      }
    }
    add_center(pick);
  }

  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  std::vector<double> transposed(dim * k);
  std::vector<int> assignments(n, -1);
  std::vector<double> scores(n, 0.0);

  // Returns the number of samples whose cluster changed.
  auto assign = [&]() {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t d = 0; d < dim; ++d) transposed[d * k + j] = result.centroids[j][d];
    }
    std::vector<std::size_t> changed(workers, 0);
    auto work = [&](std::size_t w) {
      std::vector<double> acc(k);
      for (std::size_t i = w; i < n; i += workers) {
        const std::size_t p = order[i];
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const auto& e : rows.row(p)) {
          const double* col = transposed.data() + static_cast<std::size_t>(e.dim) * k;
          for (std::size_t j = 0; j < k; ++j) acc[j] += e.value * col[j];
        }
        const auto best = static_cast<int>(std::max_element(acc.begin(), acc.end()) - acc.begin());
        if (best != assignments[p]) ++changed[w];
        assignments[p] = best;
        scores[p] = acc[static_cast<std::size_t>(best)];
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    std::size_t total = 0;
    for (auto c : changed) total += c;
    return total;
  };

  auto update = [&]() {
    std::vector<Vector> sums(k, Vector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (auto p : order) {
      const auto j = static_cast<std::size_t>(assignments[p]);
      ++counts[j];
      for (const auto& e : rows.row(p)) sums[j][e.dim] += e.value;
    }
    std::vector<char> used(n, 0);
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0 || l2_norm(sums[j]) == 0.0) {
        // Reseed from the sample currently fitting its centroid worst.
        std::size_t far = n;
        for (auto p : order) {
          if (used[p]) continue;
          if (far == n || scores[p] < scores[far]) far = p;
        }
        used[far] = 1;
        sums[j] = dense_row(far);
      }
      normalize_dense(sums[j]);
      result.centroids[j] = std::move(sums[j]);
    }
  };

  bool settled = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const auto changed = assign();
    result.iterations = it;
    result.changes_per_iteration.push_back(changed);
    if (changed == 0) {
      settled = true;
      break;
    }
    update();
  }
  if (!settled) assign();

  result.assignments = assignments;
  result.supports.assign(k, 0);
  result.objective = 0.0;
  for (auto p : order) {
    ++result.supports[static_cast<std::size_t>(assignments[p])];
    result.objective += scores[p];
  }
  return result;
}

}  // namespace fasc
