#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "fasc/error.hpp"
#include "fasc/metrics.hpp"
#include "oracles.hpp"

using namespace fasc;

namespace {

std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int classes,
                               bool outliers = false) {
  std::uniform_int_distribution<int> pick(outliers ? -1 : 0, classes - 1);
  std::vector<int> out(n);
  for (auto& x : out) x = pick(rng);
  return out;
}

}  // namespace

TEST(Ari, HandValues) {
  const std::vector<int> a{0, 0, 0, 1, 1, 1};
  const std::vector<int> b{0, 0, 1, 1, 2, 2};
  EXPECT_NEAR(adjusted_rand_index(a, b), 0.24242424242424246, 1e-12);
  const std::vector<int> c{0, 0, 1, 1};
  const std::vector<int> d{0, 1, 0, 1};
  EXPECT_NEAR(adjusted_rand_index(c, d), -0.5, 1e-12);
  const std::vector<int> e{0, 0, 1, 1, 2};
  const std::vector<int> f{0, 0, 1, 2, 2};
  EXPECT_NEAR(adjusted_rand_index(e, f), 0.375, 1e-12);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, a), 1.0);
}

TEST(Ari, DegenerateCases) {
  const std::vector<int> one{3, 3, 3};
  const std::vector<int> other{5, 5, 5};
  const std::vector<int> split{0, 1, 2};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(one, other), 1.0);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(one, split), 0.0);
  const std::vector<int> single{4};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(single, single), 1.0);
  const std::vector<int> shorter{0, 1};
  EXPECT_THROW(adjusted_rand_index(one, shorter), ConfigError);
}

TEST(Nmi, HandValues) {
  const std::vector<int> a{0, 0, 0, 1, 1, 1};
  const std::vector<int> b{0, 0, 1, 1, 2, 2};
  EXPECT_NEAR(normalized_mutual_information(a, b), 0.5158037429793888, 1e-12);
  const std::vector<int> c{0, 0, 1, 1};
  const std::vector<int> d{0, 1, 0, 1};
  EXPECT_NEAR(normalized_mutual_information(c, d), 0.0, 1e-12);
  const std::vector<int> e{0, 0, 1, 1, 2};
  const std::vector<int> f{0, 0, 1, 2, 2};
  EXPECT_NEAR(normalized_mutual_information(e, f), 0.7371754938070161, 1e-12);
  const std::vector<int> one{1, 1, 1};
  EXPECT_DOUBLE_EQ(normalized_mutual_information(one, one), 1.0);
  const std::vector<int> split{0, 1, 2};
  EXPECT_DOUBLE_EQ(normalized_mutual_information(one, split), 0.0);
}

TEST(Metrics, AgreeWithIndependentOraclesOnRandomPartitions) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(2, 300);
  std::uniform_int_distribution<int> classes(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(rng);
    const auto truth = random_labels(rng, n, classes(rng));
    auto pred = random_labels(rng, n, classes(rng), true);
    // Correlate half of the instances with the truth.
    if (trial % 2 == 0) {
      for (std::size_t i = 0; i < n; i += 2) pred[i] = truth[i] * 3 + 1;
    }
    EXPECT_NEAR(adjusted_rand_index(truth, pred), fasc::testing::pair_counting_ari(truth, pred),
                1e-12);
    EXPECT_NEAR(normalized_mutual_information(truth, pred),
                fasc::testing::entropy_nmi(truth, pred), 1e-12);
  }
}

TEST(Metrics, InvariantUnderLabelRenaming) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto truth = random_labels(rng, 120, 6);
    const auto pred = random_labels(rng, 120, 8);
    std::vector<int> names{10, 3, 77, 5, 0, 42, 8, 19};
    std::shuffle(names.begin(), names.end(), rng);
    std::vector<int> renamed(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
      renamed[i] = names[static_cast<std::size_t>(pred[i])];
    }
    EXPECT_NEAR(adjusted_rand_index(truth, pred), adjusted_rand_index(truth, renamed), 1e-12);
    EXPECT_NEAR(normalized_mutual_information(truth, pred),
                normalized_mutual_information(truth, renamed), 1e-12);
    EXPECT_NEAR(adjusted_rand_index(truth, pred), adjusted_rand_index(pred, truth), 1e-12);
  }
}

TEST(Contingency, SortedLabelsAndMarginals) {
  const std::vector<int> truth{2, 0, 2, 1};
  const std::vector<int> pred{-1, 5, 5, -1};
  const auto t = ContingencyTable::build(truth, pred);
  EXPECT_EQ(t.row_labels, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(t.col_labels, (std::vector<int>{-1, 5}));
  EXPECT_EQ(t.counts[2], (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(t.row_sums, (std::vector<std::size_t>{1, 1, 2}));
  EXPECT_EQ(t.col_sums, (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(t.total, 4u);
}

TEST(MajorityVote, MapsClustersAndCountsOutliers) {
  const std::vector<int> truth{0, 0, 1, 1, 1, 2, 1, 0};
  const std::vector<int> assign{0, 0, 0, 1, 1, kOutlier, 2, 2};
  const auto m = majority_vote_map(truth, assign);
  EXPECT_EQ(m.cluster_to_class.at(0), 0);
  EXPECT_EQ(m.cluster_to_class.at(1), 1);
  EXPECT_EQ(m.cluster_to_class.at(2), 0);  // tie between classes 0 and 1
  EXPECT_EQ(m.mapped, (std::vector<int>{0, 0, 0, 1, 1, kOutlier, 0, 0}));
  EXPECT_EQ(m.assigned, 7u);
  EXPECT_EQ(m.correct, 5u);
  EXPECT_DOUBLE_EQ(m.core_purity, 5.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.all_accuracy, 5.0 / 8.0);
  EXPECT_TRUE(m.purity_defined);

  const std::vector<int> none(8, kOutlier);
  const auto empty = majority_vote_map(truth, none);
  EXPECT_FALSE(empty.purity_defined);
  EXPECT_EQ(empty.all_accuracy, 0.0);
}

TEST(MajorityVote, CorePurityBoundsAllAccuracy) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto truth = random_labels(rng, 200, 5);
    const auto assign = random_labels(rng, 200, 9, true);
    const auto m = majority_vote_map(truth, assign);
    EXPECT_LE(m.all_accuracy, m.core_purity);
    EXPECT_LE(m.core_purity, 1.0);
    // Majority voting never does worse than any fixed class per cluster.
    std::size_t best_possible = 0;
    for (const auto& [cluster, cls] : m.cluster_to_class) {
      std::vector<std::size_t> counts(5, 0);
      for (std::size_t i = 0; i < truth.size(); ++i) {
        if (assign[i] == cluster) ++counts[static_cast<std::size_t>(truth[i])];
      }
      best_possible += *std::max_element(counts.begin(), counts.end());
    }
    EXPECT_EQ(m.correct, best_possible);
  }
}

TEST(Evaluate, PerfectPartitionWithRenamedClusters) {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> assign{7, 7, 3, 3, 9, 9};
  const auto r = evaluate_partition(truth, assign);
  EXPECT_DOUBLE_EQ(r.ari, 1.0);
  EXPECT_DOUBLE_EQ(r.nmi, 1.0);
  EXPECT_DOUBLE_EQ(r.ari_all, 1.0);
  EXPECT_DOUBLE_EQ(r.ari_clusters, 1.0);
  EXPECT_DOUBLE_EQ(r.core_purity, 1.0);
  EXPECT_DOUBLE_EQ(r.all_accuracy, 1.0);
  EXPECT_EQ(r.k_active, 3u);
  EXPECT_EQ(r.outlier_fraction, 0.0);
}

TEST(Evaluate, OutliersLowerAllSampleScoresOnly) {
  const std::vector<int> truth{0, 0, 0, 1, 1, 1};
  const std::vector<int> assign{0, 0, kOutlier, 1, 1, kOutlier};
  const auto r = evaluate_partition(truth, assign);
  EXPECT_DOUBLE_EQ(r.ari, 1.0);
  EXPECT_DOUBLE_EQ(r.core_purity, 1.0);
  EXPECT_DOUBLE_EQ(r.all_accuracy, 4.0 / 6.0);
  EXPECT_LT(r.ari_all, 1.0);
  EXPECT_DOUBLE_EQ(r.outlier_fraction, 2.0 / 6.0);
  const std::vector<int> mapped_all{0, 0, kOutlier, 1, 1, kOutlier};
  EXPECT_NEAR(r.ari_all, fasc::testing::pair_counting_ari(truth, mapped_all), 1e-12);
}

TEST(Blending, ThresholdedPairsAndPopulation) {
  const auto kernel = make_kernel("cosine");
  const std::vector<Vector> reps{{1, 0}, {1, 0.1}, {0, 1}};
  const std::vector<std::size_t> supports{5, 3, 2};
  const auto b = blending_pairs(reps, supports, 12, *kernel, 0.9);
  ASSERT_EQ(b.pairs.size(), 1u);
  EXPECT_EQ(b.pairs[0].j, 0u);
  EXPECT_EQ(b.pairs[0].k, 1u);
  EXPECT_NEAR(b.pairs[0].similarity, 1.0 / std::sqrt(1.01), 1e-12);
  EXPECT_EQ(b.population_fraction, (std::vector<double>{5.0 / 12, 3.0 / 12, 2.0 / 12}));
  ASSERT_EQ(b.similarity.size(), 3u);
  EXPECT_NEAR(b.similarity[0][2], 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(b.similarity[1][0], b.similarity[0][1]);

  const auto none = blending_pairs(reps, supports, 12, *kernel, 0.999);
  EXPECT_TRUE(none.pairs.empty());
}

TEST(Report, JsonCarriesEveryField) {
  const std::vector<int> truth{0, 0, 1, 1};
  const std::vector<int> assign{0, 0, 1, kOutlier};
  auto r = evaluate_partition(truth, assign);
  auto j = nlohmann::json::parse(r.to_json());
  for (const char* key : {"ari", "nmi", "ari_all", "nmi_all", "core_purity", "all_accuracy",
                          "K_active", "outlier_fraction"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["blending_pairs"].is_null());
  const auto kernel = make_kernel("cosine");
  r.blending = blending_pairs({{1, 0}, {1, 0.01}}, std::vector<std::size_t>{2, 1}, 4, *kernel,
                              0.9);
  j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["blending_pairs"].size(), 1u);
}
