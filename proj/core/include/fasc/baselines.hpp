#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fasc/kernels.hpp"
#include "fasc/spectra.hpp"

namespace fasc {

struct Art2aOptions {
  double vigilance = 0.8;
  double eta = 0.5;
  std::size_t k_max = 50;
  int epochs = 1;
};

struct Art2aResult {
  std::vector<int> assignments;  // per dataset position, kOutlier if skipped
  std::vector<Vector> prototypes;
  std::vector<std::size_t> supports;
  std::size_t skipped = 0;       // all-zero samples
};

// Online ART2A, presenting samples in `order` (dataset positions). A match
// at or above vigilance pulls the prototype toward the sample; otherwise a
// new prototype is created while capacity lasts, else the best match wins.
Art2aResult art2a_run(const Dataset& data, std::span<const std::size_t> order,
                      const Art2aOptions& options);

struct KMeansOptions {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  int max_iterations = 100;
  std::size_t workers = 1;
};

struct KMeansResult {
  std::vector<int> assignments;
  std::vector<Vector> centroids;  // unit norm
  std::vector<std::size_t> supports;
  int iterations = 0;
  double objective = 0.0;  // sum of cosines to assigned centroids
  std::vector<std::size_t> changes_per_iteration;
};

// Spherical K-means: k-means++ style seeding on cosine distance over the
// canonical order, then Lloyd iterations. Empty clusters are reseeded from
// the sample farthest from its centroid. Throws ConfigError when K > N.
KMeansResult spherical_kmeans(const Dataset& data, const KMeansOptions& options);

}  // namespace fasc
