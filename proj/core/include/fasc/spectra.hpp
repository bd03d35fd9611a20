#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fasc {

using SampleId = std::uint64_t;

struct Entry {
  std::uint32_t dim;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Dimensions [0, index) form the positive channel, [index, D) the negative.
struct PolaritySplit {
  std::size_t index;

  friend bool operator==(const PolaritySplit&, const PolaritySplit&) = default;
};

// A sparse non-negative spectrum. Entries are sorted by dimension and hold
// only nonzero intensities; a spectrum without entries is degenerate.
struct Spectrum {
  SampleId id = 0;
  std::vector<Entry> entries;

  bool degenerate() const noexcept { return entries.empty(); }
  std::vector<double> to_dense(std::size_t dim) const;
  static Spectrum from_dense(SampleId id, std::span<const double> values);

  friend bool operator==(const Spectrum&, const Spectrum&) = default;
};

struct Dataset {
  std::size_t dim = 0;
  std::vector<Spectrum> spectra;
  std::optional<PolaritySplit> split;
  std::optional<std::vector<int>> labels;

  std::size_t size() const noexcept { return spectra.size(); }

  // Throws ParseError when any invariant (unique ids, index range,
  // finite non-negative values, sorted entries, label count) is broken.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Dense CSV: header `id,f0,...,f{D-1}[,label]`.
Dataset load_dense_csv(const std::filesystem::path& path,
                       std::optional<std::size_t> split_index = std::nullopt);
void write_dense_csv(const Dataset& data, const std::filesystem::path& path);

// Sparse triplets `sample_id,dim,intensity` with an optional header row.
// Explicit zero intensities register a sample without adding an entry,
// which is how degenerate spectra survive the round trip.
Dataset load_sparse_triplets(const std::filesystem::path& path, std::size_t dim,
                             std::optional<std::size_t> split_index = std::nullopt);
// Reads D and the split from the sidecar written by write_sparse_triplets.
Dataset load_sparse_triplets(const std::filesystem::path& path);
// Writes the triplets plus `<path>.json` holding {D, split_index?, N}.
void write_sparse_triplets(const Dataset& data, const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& triplets);

// IDX images (magic 0x00000803) with optional labels (0x00000801). Sample
// ids are the image indices.
Dataset load_idx_images(const std::filesystem::path& images,
                        const std::optional<std::filesystem::path>& labels = std::nullopt);

// `id,label` rows with a header.
std::vector<std::pair<SampleId, int>> load_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const Dataset& data, const std::filesystem::path& path);

// Content hash of one spectrum with intensities quantised at 1e-9.
std::uint64_t content_hash(const Spectrum& s);

// Positions of `data.spectra` sorted by content: hash, then the entries
// lexicographically, then id. Depends only on the multiset of spectra.
std::vector<std::size_t> canonical_order(const Dataset& data);
std::vector<SampleId> canonical_ids(const Dataset& data);

}  // namespace fasc
