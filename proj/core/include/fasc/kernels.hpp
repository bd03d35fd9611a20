#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fasc/spectra.hpp"

namespace fasc {

using Vector = std::vector<double>;

// Half-open dimension range [begin, end).
struct ChannelRange {
  std::size_t begin;
  std::size_t end;
};

struct DualCosineScore {
  double pos;
  double neg;
  double combined;
};

double cosine(std::span<const double> u, std::span<const double> v);
DualCosineScore dual_cosine(std::span<const double> u, std::span<const double> v,
                            PolaritySplit split);
double dual_cosine_dissimilarity(std::span<const double> u, std::span<const double> v,
                                 PolaritySplit split);
double sq_euclidean_divergence(std::span<const double> x, std::span<const double> c);

// A similarity oracle together with the centroid rule it induces.
//
// Scores are always computed on *prepared* vectors: cosine-family kernels
// normalise every channel to unit length, the others use raw values. The
// phase-1 batch code prepares samples once and relies on
// similarity(u, v) == prepared_similarity(prepare(u), prepare(v)) holding
// bit for bit.
class Kernel {
 public:
  virtual ~Kernel() = default;

  virtual std::string_view name() const = 0;
  virtual bool is_bounded() const = 0;
  virtual bool is_symmetric() const { return true; }
  virtual bool has_bregman() const { return false; }

  virtual void prepare(std::span<double> v) const { (void)v; }
  virtual double prepared_similarity(std::span<const double> a,
                                     std::span<const double> b) const = 0;
  virtual double dissimilarity(std::span<const double> u,
                               std::span<const double> v) const = 0;

  // Bregman divergence D_phi(x, c); throws InvariantError when the kernel
  // has none.
  virtual double divergence(std::span<const double> x, std::span<const double> c) const;

  // Generalised centroid of sparse members over `dim` dimensions. Throws
  // InvariantError on an empty member list.
  virtual Vector frechet_mean(std::span<const Spectrum* const> members,
                              std::size_t dim) const = 0;

  // Channels over which a cosine is taken, or empty for kernels that are
  // not in the cosine family.
  virtual std::vector<ChannelRange> cosine_channels(std::size_t dim) const {
    (void)dim;
    return {};
  }

  double similarity(std::span<const double> u, std::span<const double> v) const;
  Vector prepared(std::span<const double> v) const;
  Vector frechet_mean(std::span<const Vector> members) const;
};

// Names: cosine | dual-cosine | sqeuclidean | manhattan. dual-cosine needs
// a split. Throws ConfigError("kernel", ...) on unknown names.
std::unique_ptr<Kernel> make_kernel(std::string_view name,
                                    std::optional<PolaritySplit> split = std::nullopt);

// l2-normalises each channel of a sparse row in place (zero channels stay
// zero). Matches Kernel::prepare on the densified row exactly.
void normalize_channels(std::span<Entry> entries, std::span<const ChannelRange> channels);

}  // namespace fasc
