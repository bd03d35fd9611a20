#include "fasc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fasc/error.hpp"

namespace fasc {
namespace {

void check_dims(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw InvariantError("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
  }
}

double clamp_unit(double s) { return std::clamp(s, -1.0, 1.0); }

void normalize_range(std::span<double> v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  if (ss == 0.0) return;
  const double inv = 1.0 / std::sqrt(ss);
  for (double& x : v) x *= inv;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
  return s;
}

void accumulate_sparse(const Spectrum& s, std::span<double> acc, double scale = 1.0) {
  for (const auto& e : s.entries) acc[e.dim] += e.value * scale;
}

// Sum of channel-normalised members, then channel-normalised again.
Vector normalized_sum(std::span<const Spectrum* const> members, std::size_t dim,
                      std::span<const ChannelRange> channels) {
  Vector acc(dim, 0.0);
  std::vector<Entry> scratch;
  for (const Spectrum* m : members) {
    scratch.assign(m->entries.begin(), m->entries.end());
    normalize_channels(scratch, channels);
    for (const auto& e : scratch) acc[e.dim] += e.value;
  }
  for (const auto& ch : channels) {
    normalize_range(std::span<double>(acc).subspan(ch.begin, ch.end - ch.begin));
  }
  return acc;
}

void require_members(std::span<const Spectrum* const> members) {
  if (members.empty()) throw InvariantError("Frechet mean of an empty membership");
}

class CosineKernel final : public Kernel {
 public:
  std::string_view name() const override { return "cosine"; }
  bool is_bounded() const override { return true; }
  void prepare(std::span<double> v) const override { normalize_range(v); }
  double prepared_similarity(std::span<const double> a,
                             std::span<const double> b) const override {
    check_dims(a, b);
    return clamp_unit(dot(a, b));
  }
  double dissimilarity(std::span<const double> u, std::span<const double> v) const override {
    return std::acos(similarity(u, v));
  }
  Vector frechet_mean(std::span<const Spectrum* const> members,
                      std::size_t dim) const override {
    require_members(members);
    const ChannelRange all{0, dim};
    return normalized_sum(members, dim, {&all, 1});
  }
  std::vector<ChannelRange> cosine_channels(std::size_t dim) const override {
    return {{0, dim}};
  }
};

class DualCosineKernel final : public Kernel {
 public:
  explicit DualCosineKernel(PolaritySplit split) : split_(split) {}

  std::string_view name() const override { return "dual-cosine"; }
  bool is_bounded() const override { return true; }
  void prepare(std::span<double> v) const override {
    check_split(v.size());
    normalize_range(v.first(split_.index));
    normalize_range(v.subspan(split_.index));
  }
  double prepared_similarity(std::span<const double> a,
                             std::span<const double> b) const override {
    check_dims(a, b);
    check_split(a.size());
    const double pos = clamp_unit(dot(a.first(split_.index), b.first(split_.index)));
    const double neg = clamp_unit(dot(a.subspan(split_.index), b.subspan(split_.index)));
    return std::min(pos, neg);
  }
  double dissimilarity(std::span<const double> u, std::span<const double> v) const override {
    return std::acos(similarity(u, v));
  }
  Vector frechet_mean(std::span<const Spectrum* const> members,
                      std::size_t dim) const override {
    require_members(members);
    const auto channels = cosine_channels(dim);
    return normalized_sum(members, dim, channels);
  }
  std::vector<ChannelRange> cosine_channels(std::size_t dim) const override {
    check_split(dim);
    return {{0, split_.index}, {split_.index, dim}};
  }

 private:
  void check_split(std::size_t dim) const {
    if (split_.index == 0 || split_.index >= dim) {
      throw InvariantError("polarity split outside (0, D)");
    }
  }
  PolaritySplit split_;
};

class SqEuclideanKernel final : public Kernel {
 public:
  std::string_view name() const override { return "sqeuclidean"; }
  bool is_bounded() const override { return false; }
  bool has_bregman() const override { return true; }
  double prepared_similarity(std::span<const double> a,
                             std::span<const double> b) const override {
    return -sq_euclidean_divergence(a, b);
  }
  double dissimilarity(std::span<const double> u, std::span<const double> v) const override {
    return sq_euclidean_divergence(u, v);
  }
  double divergence(std::span<const double> x, std::span<const double> c) const override {
    return sq_euclidean_divergence(x, c);
  }
  Vector frechet_mean(std::span<const Spectrum* const> members,
                      std::size_t dim) const override {
    require_members(members);
    Vector acc(dim, 0.0);
    for (const Spectrum* m : members) accumulate_sparse(*m, acc);
    const double n = static_cast<double>(members.size());
    for (double& x : acc) x /= n;
    return acc;
  }
};

class ManhattanKernel final : public Kernel {
 public:
  std::string_view name() const override { return "manhattan"; }
  bool is_bounded() const override { return false; }
  double prepared_similarity(std::span<const double> a,
                             std::span<const double> b) const override {
    return -dissimilarity(a, b);
  }
  double dissimilarity(std::span<const double> u, std::span<const double> v) const override {
    check_dims(u, v);
    double s = 0.0;
    for (std::size_t d = 0; d < u.size(); ++d) s += std::abs(u[d] - v[d]);
    return s;
  }
  // Coordinate-wise lower median, the exact minimiser of summed L1 distance.
  Vector frechet_mean(std::span<const Spectrum* const> members,
                      std::size_t dim) const override {
    require_members(members);
    std::vector<std::vector<double>> nonzero(dim);
    for (const Spectrum* m : members) {
      for (const auto& e : m->entries) nonzero[e.dim].push_back(e.value);
    }
    const std::size_t n = members.size();
    const std::size_t target = (n - 1) / 2;
    Vector out(dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
      auto& vals = nonzero[d];
      std::sort(vals.begin(), vals.end());
      const std::size_t negatives =
          static_cast<std::size_t>(std::lower_bound(vals.begin(), vals.end(), 0.0) - vals.begin());
      const std::size_t zeros = n - vals.size();
      if (target < negatives) {
        out[d] = vals[target];
      } else if (target < negatives + zeros) {
        out[d] = 0.0;
      } else {
        out[d] = vals[target - zeros];
      }
    }
    return out;
  }
};

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  static const CosineKernel kernel;
  check_dims(u, v);
  return kernel.similarity(u, v);
}

DualCosineScore dual_cosine(std::span<const double> u, std::span<const double> v,
                            PolaritySplit split) {
  check_dims(u, v);
  if (split.index == 0 || split.index >= u.size()) {
    throw InvariantError("polarity split outside (0, D)");
  }
  DualCosineScore s;
  s.pos = cosine(u.first(split.index), v.first(split.index));
  s.neg = cosine(u.subspan(split.index), v.subspan(split.index));
  s.combined = std::min(s.pos, s.neg);
  return s;
}

double dual_cosine_dissimilarity(std::span<const double> u, std::span<const double> v,
                                 PolaritySplit split) {
  return std::acos(std::clamp(dual_cosine(u, v, split).combined, -1.0, 1.0));
}

double sq_euclidean_divergence(std::span<const double> x, std::span<const double> c) {
  check_dims(x, c);
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - c[d];
    s += diff * diff;
  }
  return s;
}

double Kernel::divergence(std::span<const double>, std::span<const double>) const {
  throw InvariantError("SF objective requires a Bregman kernel");
}

double Kernel::similarity(std::span<const double> u, std::span<const double> v) const {
  check_dims(u, v);
  const Vector a = prepared(u);
  const Vector b = prepared(v);
  return prepared_similarity(a, b);
}

Vector Kernel::prepared(std::span<const double> v) const {
  Vector out(v.begin(), v.end());
  prepare(out);
  return out;
}

Vector Kernel::frechet_mean(std::span<const Vector> members) const {
  if (members.empty()) throw InvariantError("Frechet mean of an empty membership");
  std::vector<Spectrum> sparse;
  sparse.reserve(members.size());
  for (const auto& m : members) {
    check_dims(m, members.front());
    sparse.push_back(Spectrum::from_dense(0, m));
  }
  std::vector<const Spectrum*> ptrs;
  for (const auto& s : sparse) ptrs.push_back(&s);
  return frechet_mean(ptrs, members.front().size());
}

std::unique_ptr<Kernel> make_kernel(std::string_view name, std::optional<PolaritySplit> split) {
  if (name == "cosine") return std::make_unique<CosineKernel>();
  if (name == "dual-cosine") {
    if (!split) throw ConfigError("kernel", "dual-cosine requires a polarity split");
    return std::make_unique<DualCosineKernel>(*split);
  }
  if (name == "sqeuclidean") return std::make_unique<SqEuclideanKernel>();
  if (name == "manhattan") return std::make_unique<ManhattanKernel>();
  throw ConfigError("kernel", "unknown kernel '" + std::string(name) + "'");
}

void normalize_channels(std::span<Entry> entries, std::span<const ChannelRange> channels) {
  std::size_t k = 0;
  for (const auto& ch : channels) {
    while (k < entries.size() && entries[k].dim < ch.begin) ++k;
    const std::size_t first = k;
    double ss = 0.0;
    while (k < entries.size() && entries[k].dim < ch.end) {
      ss += entries[k].value * entries[k].value;
      ++k;
    }
    if (ss == 0.0) continue;
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t i = first; i < k; ++i) entries[i].value *= inv;
  }
}

}  // namespace fasc
