#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fasc/kernels.hpp"
#include "fasc/state.hpp"

namespace fasc {

// Rows are true classes, columns predicted clusters, both in ascending
// label order.
struct ContingencyTable {
  std::vector<int> row_labels;
  std::vector<int> col_labels;
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::size_t total = 0;

  static ContingencyTable build(std::span<const int> truth, std::span<const int> predicted);
};

// kOutlier in `predicted` is an ordinary label here, i.e. the outlier pool
// counts as one extra cluster.
double adjusted_rand_index(std::span<const int> truth, std::span<const int> predicted);
double normalized_mutual_information(std::span<const int> truth,
                                     std::span<const int> predicted);

struct MappedPartition {
  std::map<int, int> cluster_to_class;
  std::vector<int> mapped;          // kOutlier for unassigned samples
  std::size_t assigned = 0;
  std::size_t correct = 0;
  double core_purity = 0.0;         // correct / assigned
  double all_accuracy = 0.0;        // correct / N
  bool purity_defined = false;      // false when nothing was assigned
};

// Every cluster maps to its majority class, ties to the smaller class id.
MappedPartition majority_vote_map(std::span<const int> truth, std::span<const int> assignments);

struct BlendingPair {
  std::size_t j;
  std::size_t k;
  double similarity;
};

struct BlendingReport {
  std::vector<BlendingPair> pairs;  // j < k, similarity >= threshold
  std::vector<std::vector<double>> similarity;
  std::vector<double> population_fraction;
};

BlendingReport blending_pairs(const std::vector<Vector>& representatives,
                              std::span<const std::size_t> supports, std::size_t total,
                              const Kernel& kernel, double threshold);
BlendingReport blending_pairs(const ClusterState& state, const Kernel& kernel,
                              double threshold);

// ARI/NMI are computed on the majority-vote mapped labels: over assigned
// samples only ("core") and over all samples with outliers as one penalty
// class ("all").
struct MetricsReport {
  double ari = 0.0;
  double nmi = 0.0;
  double ari_all = 0.0;
  double nmi_all = 0.0;
  double ari_clusters = 0.0;  // raw cluster ids vs classes, outliers one class
  double core_purity = 0.0;
  double all_accuracy = 0.0;
  std::size_t k_active = 0;
  double outlier_fraction = 0.0;
  std::optional<BlendingReport> blending;

  std::string to_json() const;
};

MetricsReport evaluate_partition(std::span<const int> truth, std::span<const int> assignments);

}  // namespace fasc
