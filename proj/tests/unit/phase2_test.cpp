#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fasc/error.hpp"
#include "fasc/phase1.hpp"
#include "fasc/phase2.hpp"
#include "oracles.hpp"

using namespace fasc;

namespace {

std::size_t assigned_count(const ClusterState& s) {
  return s.assignments.size() - s.outliers();
}

void expect_supports_match_assignments(const ClusterState& s) {
  std::vector<std::size_t> counts(s.active(), 0);
  for (int a : s.assignments) {
    if (a == kOutlier) continue;
    ASSERT_GE(a, 0);
    ASSERT_LT(static_cast<std::size_t>(a), s.active());
    ++counts[static_cast<std::size_t>(a)];
  }
  EXPECT_EQ(counts, s.supports());
}

}  // namespace

TEST(Recompute, SqEuclideanMeanAndSupport) {
  const auto rows = fasc::testing::dataset_from_rows({{1, 2}, {3, 4}, {9, 9}});
  const auto kernel = make_kernel("sqeuclidean");
  const PreparedDataset data(rows, *kernel);
  ClusterState s;
  s.clusters = {Cluster{{0, 0}, 0, 0, false, true}, Cluster{{7, 7}, 4, 0, false, true}};
  s.assignments = {0, 0, kOutlier};
  recompute_representatives(data, s);
  EXPECT_EQ(s.clusters[0].representative, (Vector{2, 3}));
  EXPECT_EQ(s.clusters[0].support, 2u);
  // Memberless: support drops to zero, representative kept.
  EXPECT_EQ(s.clusters[1].representative, (Vector{7, 7}));
  EXPECT_EQ(s.clusters[1].support, 0u);
}

TEST(Memberships, CanonicalOrderAndBadIds) {
  const auto rows = fasc::testing::dataset_from_rows({{3, 0}, {1, 0}, {2, 0}});
  const auto kernel = make_kernel("cosine");
  const PreparedDataset data(rows, *kernel);
  ClusterState s;
  s.clusters.resize(1);
  s.assignments = {0, 0, 0};
  const auto m = memberships(data, s);
  ASSERT_EQ(m[0].size(), 3u);
  for (std::size_t k = 1; k < 3; ++k) EXPECT_LT(data.rank()[m[0][k - 1]], data.rank()[m[0][k]]);
  s.assignments = {0, 4, 0};
  EXPECT_THROW(memberships(data, s), InvariantError);
}

TEST(Merge, LargerClusterAbsorbsSmaller) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({1.0, 0.01 * i, 0.0});
  for (int i = 0; i < 3; ++i) rows.push_back({1.0, 0.02 + 0.01 * i, 0.001});
  rows.push_back({0.0, 0.0, 1.0});
  const auto ds = fasc::testing::dataset_from_rows(rows);
  const auto kernel = make_kernel("cosine");
  const PreparedDataset data(ds, *kernel);
  ClusterState s;
  s.clusters.resize(3);
  s.assignments = {1, 1, 1, 1, 1, 0, 0, 0, 2};
  recompute_representatives(data, s);
  const auto plans = merge_pass(data, s, 0.9);
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_EQ(plans[0].anchor, 1u);
  EXPECT_EQ(plans[0].absorbed, (std::vector<std::size_t>{0}));
  EXPECT_EQ(plans[0].moved, 3u);
  EXPECT_EQ(s.clusters[1].support, 8u);
  EXPECT_FALSE(s.clusters[0].alive);
  EXPECT_EQ(s.clusters[2].support, 1u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(s.assignments[i], 1);

  std::vector<const Spectrum*> all;
  for (std::size_t i = 0; i < 8; ++i) all.push_back(&ds.spectra[i]);
  const auto expected = kernel->frechet_mean(all, 3);
  for (std::size_t d = 0; d < 3; ++d) {
    EXPECT_NEAR(s.clusters[1].representative[d], expected[d], 1e-12);
  }
}

TEST(Merge, CascadesUntilNoPairQualifies) {
  // c is too far from a and from b, but close to the mean of a and b, so it
  // only joins once a has absorbed b.
  const double pi = std::acos(-1.0);
  const double theta = 18.0 * pi / 180.0;
  const double psi = std::acos(0.96);
  const double half = theta / 2.0;
  const std::vector<double> a{1.0, 0.0, 0.0};
  const std::vector<double> b{std::cos(theta), std::sin(theta), 0.0};
  const std::vector<double> c{std::cos(psi) * std::cos(half), std::cos(psi) * std::sin(half),
                              std::sin(psi)};
  const auto ds = fasc::testing::dataset_from_rows({a, a, b, b, c});
  const auto kernel = make_kernel("cosine");
  const PreparedDataset data(ds, *kernel);
  ClusterState s;
  s.clusters.resize(3);
  s.assignments = {0, 0, 1, 1, 2};
  recompute_representatives(data, s);
  const double tau = 0.95;
  const auto sim = [&](std::size_t x, std::size_t y) {
    return kernel->similarity(s.clusters[x].representative, s.clusters[y].representative);
  };
  ASSERT_GE(sim(0, 1), tau);
  ASSERT_LT(sim(0, 2), tau);
  ASSERT_LT(sim(1, 2), tau);
  const auto plans = merge_pass(data, s, tau);
  EXPECT_EQ(plans.size(), 2u);
  std::size_t alive = 0;
  std::size_t support = 0;
  for (const auto& cl : s.clusters) {
    if (!cl.alive) continue;
    ++alive;
    support = cl.support;
  }
  EXPECT_EQ(alive, 1u);
  EXPECT_EQ(support, 5u);
  std::size_t moved = 0;
  for (const auto& p : plans) moved += p.moved;
  EXPECT_LE(moved, 5u);
}

TEST(Merge, PostConditionOnRandomStates) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = fasc::testing::random_dataset(rng, 200, 6, 0.6);
    const auto kernel = make_kernel("cosine");
    const PreparedDataset data(ds, *kernel);
    ClusterState s;
    s.clusters.resize(25);
    std::uniform_int_distribution<int> pick(-1, 24);
    for (std::size_t i = 0; i < 200; ++i) s.assignments.push_back(pick(rng));
    recompute_representatives(data, s);
    const std::size_t before = assigned_count(s);
    const auto plans = merge_pass(data, s, 0.8);
    std::size_t moved = 0;
    for (const auto& p : plans) moved += p.moved;
    EXPECT_LE(moved, data.size());
    EXPECT_EQ(assigned_count(s), before);
    for (std::size_t a = 0; a < s.active(); ++a) {
      if (!s.clusters[a].alive || s.clusters[a].support == 0) continue;
      for (std::size_t b = a + 1; b < s.active(); ++b) {
        if (!s.clusters[b].alive || s.clusters[b].support == 0) continue;
        EXPECT_LT(kernel->similarity(s.clusters[a].representative, s.clusters[b].representative),
                  0.8);
      }
    }
    for (int x : s.assignments) {
      if (x != kOutlier) EXPECT_TRUE(s.clusters[static_cast<std::size_t>(x)].alive);
    }
  }
}

TEST(Dissolve, SmallClustersRevertExceptNewlyPromoted) {
  ClusterState s;
  s.clusters = {Cluster{{1}, 5, 0, false, true}, Cluster{{1}, 2, 0, false, true},
                Cluster{{1}, 2, 0, true, true}, Cluster{{1}, 0, 0, true, true}};
  s.assignments = {0, 0, 0, 0, 0, 1, 1, 2, 2, kOutlier};
  FascConfig config;
  config.min_support = 3;
  EXPECT_EQ(dissolve_small(s, config), 2u);
  EXPECT_TRUE(s.clusters[0].alive);
  EXPECT_FALSE(s.clusters[1].alive);
  EXPECT_TRUE(s.clusters[2].alive);
  EXPECT_FALSE(s.clusters[3].alive);
  EXPECT_EQ(s.assignments, (std::vector<int>{0, 0, 0, 0, 0, kOutlier, kOutlier, 2, 2, kOutlier}));
  for (const auto& c : s.clusters) EXPECT_FALSE(c.newly_promoted);
  // Next time round the surviving small cluster is no longer exempt.
  EXPECT_EQ(dissolve_small(s, config), 1u);
  EXPECT_FALSE(s.clusters[2].alive);
}

TEST(Renumber, CompactsSurvivorsInOrder) {
  ClusterState s;
  for (int j = 0; j < 6; ++j) {
    s.clusters.push_back(Cluster{{static_cast<double>(j)}, 1, j, false, j == 0 || j == 2 || j == 5});
  }
  s.assignments = {5, 0, kOutlier, 2, 5};
  renumber(s);
  ASSERT_EQ(s.active(), 3u);
  EXPECT_EQ(s.clusters[0].representative, (Vector{0}));
  EXPECT_EQ(s.clusters[1].representative, (Vector{2}));
  EXPECT_EQ(s.clusters[2].representative, (Vector{5}));
  EXPECT_EQ(s.assignments, (std::vector<int>{2, 0, kOutlier, 1, 2}));

  s.clusters[1].alive = false;
  EXPECT_THROW(renumber(s), InvariantError);
}

TEST(Consolidate, ConservesMassAndCounts) {
  std::mt19937_64 rng(8);
  for (const std::string name : {"cosine", "sqeuclidean", "manhattan"}) {
    const auto ds = fasc::testing::random_dataset(rng, 300, 8, 0.5);
    const auto kernel = make_kernel(name);
    const PreparedDataset data(ds, *kernel);
    FascConfig config;
    config.tau_intra = name == "cosine" ? 0.5 : -2.0;
    config.tau_inter = name == "cosine" ? 0.85 : -0.3;
    config.min_support = 4;
    config.capacity.k_max = 30;
    auto state = initialize(data, config);
    for (int t = 0; t < 5; ++t) {
      ++state.iteration;
      auto r = assign_all(data, state, config);
      state.assignments = r.assignments;
      promote_outliers(data, state, config, r.best_scores);
      const std::size_t before = assigned_count(state);
      const auto stats = consolidate(data, state, config);
      EXPECT_LE(stats.touched, data.size());
      EXPECT_LE(assigned_count(state), before);
      expect_supports_match_assignments(state);
      std::size_t total = state.outliers();
      for (auto n : state.supports()) {
        EXPECT_GT(n, 0u);
        total += n;
      }
      EXPECT_EQ(total, data.size()) << name;
      EXPECT_LE(state.active(), config.capacity.k_max);
      for (const auto& c : state.clusters) {
        EXPECT_TRUE(c.alive);
        EXPECT_FALSE(c.newly_promoted);
        // Clusters promoted this iteration are exempt once.
        if (c.born_iteration < state.iteration) EXPECT_GE(c.support, config.min_support);
      }
    }
  }
}

TEST(Consolidate, WithoutStructuralEditsOnlyRecomputes) {
  const auto ds = fasc::testing::dataset_from_rows({{1, 0}, {1, 0.01}, {0, 1}});
  const auto kernel = make_kernel("cosine");
  const PreparedDataset data(ds, *kernel);
  ClusterState s;
  s.clusters = {Cluster{{1, 0}, 1, 0, true, true}, Cluster{{1, 0}, 1, 0, false, true}};
  s.assignments = {0, 1, kOutlier};
  FascConfig config;
  config.structural_edits = false;
  config.min_support = 5;
  const auto stats = consolidate(data, s, config);
  EXPECT_EQ(stats.merged, 0u);
  EXPECT_EQ(stats.dissolved, 0u);
  EXPECT_EQ(s.active(), 2u);
}
