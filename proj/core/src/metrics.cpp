#include "fasc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fasc/error.hpp"
#include <nlohmann/json.hpp>

namespace fasc {
namespace {

double choose2(std::size_t n) {
  const double x = static_cast<double>(n);
  return x * (x - 1.0) / 2.0;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ConfigError("labels", "label count " + std::to_string(a) +
                                    " does not match assignment count " + std::to_string(b));
  }
}

std::vector<int> distinct(std::span<const int> v) {
  std::vector<int> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t index_of(const std::vector<int>& sorted, int label) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), label) -
                                  sorted.begin());
}

// Each row and each column has exactly one non-zero cell.
bool identical_partitions(const ContingencyTable& t) {
  if (t.row_labels.size() != t.col_labels.size()) return false;
  for (const auto& row : t.counts) {
    if (std::count_if(row.begin(), row.end(), [](std::size_t c) { return c > 0; }) != 1) {
      return false;
    }
  }
  return true;
}

}  // namespace

ContingencyTable ContingencyTable::build(std::span<const int> truth,
                                         std::span<const int> predicted) {
  check_lengths(truth.size(), predicted.size());
  ContingencyTable t;
  t.row_labels = distinct(truth);
  t.col_labels = distinct(predicted);
  t.counts.assign(t.row_labels.size(), std::vector<std::size_t>(t.col_labels.size(), 0));
  t.row_sums.assign(t.row_labels.size(), 0);
  t.col_sums.assign(t.col_labels.size(), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto r = index_of(t.row_labels, truth[i]);
    const auto c = index_of(t.col_labels, predicted[i]);
    ++t.counts[r][c];
    ++t.row_sums[r];
    ++t.col_sums[c];
  }
  t.total = truth.size();
  return t;
}

double adjusted_rand_index(std::span<const int> truth, std::span<const int> predicted) {
  const auto t = ContingencyTable::build(truth, predicted);
  double index = 0.0;
  for (const auto& row : t.counts) {
    for (auto n : row) index += choose2(n);
  }
  double a = 0.0;
  for (auto n : t.row_sums) a += choose2(n);
  double b = 0.0;
  for (auto n : t.col_sums) b += choose2(n);
  const double pairs = choose2(t.total);
  if (pairs == 0.0) return 1.0;
  const double expected = a * b / pairs;
  const double max_index = (a + b) / 2.0;
  if (max_index == expected) return identical_partitions(t) ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

double normalized_mutual_information(std::span<const int> truth,
                                     std::span<const int> predicted) {
  const auto t = ContingencyTable::build(truth, predicted);
  if (t.total == 0) return 1.0;
  const double n = static_cast<double>(t.total);
  auto entropy = [n](const std::vector<std::size_t>& sums) {
    double h = 0.0;
    for (auto s : sums) {
      if (s == 0) continue;
      const double p = static_cast<double>(s) / n;
      h -= p * std::log(p);
    }
    return h;
  };
  const double hy = entropy(t.row_sums);
  const double hc = entropy(t.col_sums);
  if (hy == 0.0 || hc == 0.0) return identical_partitions(t) ? 1.0 : 0.0;
  double mi = 0.0;
  for (std::size_t r = 0; r < t.counts.size(); ++r) {
    for (std::size_t c = 0; c < t.counts[r].size(); ++c) {
      const auto nij = t.counts[r][c];
      if (nij == 0) continue;
      const double ratio = (static_cast<double>(nij) * n) /
                           (static_cast<double>(t.row_sums[r]) * static_cast<double>(t.col_sums[c]));
      mi += static_cast<double>(nij) / n * std::log(ratio);
    }
  }
  return std::clamp(2.0 * mi / (hy + hc), 0.0, 1.0);
}

MappedPartition majority_vote_map(std::span<const int> truth, std::span<const int> assignments) {
  check_lengths(truth.size(), assignments.size());
  std::map<int, std::map<int, std::size_t>> votes;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (assignments[i] == kOutlier) continue;
    ++votes[assignments[i]][truth[i]];
  }
  MappedPartition m;
  for (const auto& [cluster, counts] : votes) {
    int best = counts.begin()->first;
    std::size_t best_count = 0;
    for (const auto& [label, count] : counts) {
      if (count > best_count) {
        best = label;
        best_count = count;
      }
    }
    m.cluster_to_class[cluster] = best;
  }
  m.mapped.assign(truth.size(), kOutlier);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (assignments[i] == kOutlier) continue;
    m.mapped[i] = m.cluster_to_class.at(assignments[i]);
    ++m.assigned;
    if (m.mapped[i] == truth[i]) ++m.correct;
  }
  m.purity_defined = m.assigned > 0;
  if (m.purity_defined) {
    m.core_purity = static_cast<double>(m.correct) / static_cast<double>(m.assigned);
  }
  if (!truth.empty()) {
    m.all_accuracy = static_cast<double>(m.correct) / static_cast<double>(truth.size());
  }
  return m;
}

BlendingReport blending_pairs(const std::vector<Vector>& representatives,
                              std::span<const std::size_t> supports, std::size_t total,
                              const Kernel& kernel, double threshold) {
  const std::size_t k = representatives.size();
  BlendingReport report;
  std::vector<Vector> prepared;
  prepared.reserve(k);
  for (const auto& r : representatives) prepared.push_back(kernel.prepared(r));
  report.similarity.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l < k; ++l) {
      report.similarity[j][l] = kernel.prepared_similarity(prepared[j], prepared[l]);
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l) {
      if (report.similarity[j][l] >= threshold) {
        report.pairs.push_back({j, l, report.similarity[j][l]});
      }
    }
  }
  report.population_fraction.assign(k, 0.0);
  if (total > 0) {
    for (std::size_t j = 0; j < k && j < supports.size(); ++j) {
      report.population_fraction[j] =
          static_cast<double>(supports[j]) / static_cast<double>(total);
    }
  }
  return report;
}

BlendingReport blending_pairs(const ClusterState& state, const Kernel& kernel,
                              double threshold) {
  std::vector<Vector> reps;
  std::vector<std::size_t> supports;
  for (const auto& c : state.clusters) {
    if (!c.alive) continue;
    reps.push_back(c.representative);
    supports.push_back(c.support);
  }
  return blending_pairs(reps, supports, state.assignments.size(), kernel, threshold);
}

MetricsReport evaluate_partition(std::span<const int> truth, std::span<const int> assignments) {
  const auto mapped = majority_vote_map(truth, assignments);
  MetricsReport r;
  std::vector<int> core_truth;
  std::vector<int> core_mapped;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (assignments[i] == kOutlier) continue;
    core_truth.push_back(truth[i]);
    core_mapped.push_back(mapped.mapped[i]);
  }
  if (!core_truth.empty()) {
    r.ari = adjusted_rand_index(core_truth, core_mapped);
    r.nmi = normalized_mutual_information(core_truth, core_mapped);
  }
  r.ari_all = adjusted_rand_index(truth, mapped.mapped);
  r.nmi_all = normalized_mutual_information(truth, mapped.mapped);
  r.ari_clusters = adjusted_rand_index(truth, assignments);
  r.core_purity = mapped.core_purity;
  r.all_accuracy = mapped.all_accuracy;
  r.k_active = mapped.cluster_to_class.size();
  if (!truth.empty()) {
    r.outlier_fraction = static_cast<double>(truth.size() - mapped.assigned) /
                         static_cast<double>(truth.size());
  }
  return r;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["ari"] = ari;
  j["nmi"] = nmi;
  j["ari_all"] = ari_all;
  j["nmi_all"] = nmi_all;
  j["ari_clusters"] = ari_clusters;
  j["core_purity"] = core_purity;
  j["all_accuracy"] = all_accuracy;
  j["K_active"] = k_active;
  j["outlier_fraction"] = outlier_fraction;
  if (blending) {
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : blending->pairs) {
      pairs.push_back({{"j", p.j}, {"k", p.k}, {"similarity", p.similarity}});
    }
    j["blending_pairs"] = pairs;
    j["similarity_matrix"] = blending->similarity;
    j["population_fraction"] = blending->population_fraction;
  } else {
    j["blending_pairs"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace fasc
