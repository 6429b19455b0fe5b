#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "newsflow/analytics.hpp"

using namespace newsflow;

namespace {

RunResult synthetic_run(std::size_t users, int turns, const std::function<std::uint16_t(std::size_t, int)>& argmax,
                        const std::function<double(std::size_t, int)>& h) {
  RunResult run;
  for (int t = 0; t <= turns; ++t) {
    TurnRecord r;
    r.day = t;
    for (std::size_t u = 0; u < users; ++u) {
      r.entropy.push_back(h(u, t));
      r.argmax.push_back(argmax(u, t));
      r.watch_share.push_back(0.1);
      r.max_share.push_back(u % 2 ? 0.6 : 0.3);
      r.reads.push_back(t == 0 ? 0 : 5);
    }
    run.records.push_back(std::move(r));
  }
  return run;
}

}  // namespace

TEST(ClusterEntropy, Examples) {
  const CommunityMap comm{{1, 0}, {2, 0}, {3, 1}, {4, 2}, {5, 3}, {6, 1}};
  const BrowseLog log({{7, 1, 1}, {7, 2, 2},                          // user 7: one community
                       {8, 1, 1}, {8, 3, 1}, {8, 4, 2}, {8, 5, 3},    // user 8: four communities
                       {9, 1, 1}, {9, 2, 1}, {9, 3, 1}, {9, 6, 20}});  // user 9: (2,1) in window, (2,2) overall
  const PeriodWindow w{1, 10}, all{1, 30};
  EXPECT_EQ(*cluster_entropy(log, comm, w, 7), 0.0);
  EXPECT_NEAR(*cluster_entropy(log, comm, w, 8), 2.0, 1e-12);
  const BrowseLog three_one({{1, 1, 1}, {1, 2, 1}, {1, 3, 1}, {1, 4, 1}});
  const CommunityMap c2{{1, 0}, {2, 0}, {3, 0}, {4, 1}};
  EXPECT_NEAR(*cluster_entropy(three_one, c2, w, 1), 0.8113, 1e-4);
  EXPECT_FALSE(cluster_entropy(log, comm, PeriodWindow{40, 50}, 7).has_value());
  EXPECT_NEAR(*cluster_entropy(log, comm, w, 9), std::log2(3.0) - 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(*cluster_entropy(log, comm, all, 9), 1.0, 1e-12);
}

TEST(ClusterEntropy, PermutationInvariantInLabels) {
  RngStream rng(5, 0);
  std::vector<BrowseRecord> recs;
  for (int i = 0; i < 200; ++i) {
    recs.push_back({static_cast<UserId>(rng.below(10)), static_cast<ArticleId>(rng.below(30)),
                    1 + static_cast<int>(rng.below(10))});
  }
  const BrowseLog log(recs);
  CommunityMap a, b;
  std::vector<std::uint32_t> perm{3, 0, 4, 1, 2};
  for (ArticleId x = 0; x < 30; ++x) {
    a[x] = x % 5;
    b[x] = perm[x % 5];
  }
  for (UserId u = 0; u < 10; ++u) {
    const auto ha = cluster_entropy(log, a, {1, 10}, u), hb = cluster_entropy(log, b, {1, 10}, u);
    ASSERT_EQ(ha.has_value(), hb.has_value());
    if (ha) EXPECT_NEAR(*ha, *hb, 1e-12);
  }
}

TEST(ClusterDiversity, DriftAndBounds) {
  // User 1 spreads over 4 communities early and concentrates later.
  std::vector<BrowseRecord> recs;
  for (ArticleId a = 0; a < 4; ++a) recs.push_back({1, a, 1});
  for (ArticleId a = 10; a < 14; ++a) recs.push_back({1, a, 40});
  // User 2 reads 1 + 1 articles.
  recs.push_back({2, 0, 2});
  recs.push_back({2, 10, 41});
  // User 3 reads an uncovered article.
  recs.push_back({3, 99, 2});
  CommunityMap comm;
  for (ArticleId a = 0; a < 4; ++a) comm[a] = a;
  for (ArticleId a = 10; a < 14; ++a) comm[a] = 0;
  const BrowseLog log(recs);
  const auto d = cluster_diversity(log, comm, {1, 10}, {36, 45});
  ASSERT_EQ(d.users.size(), 2u);
  EXPECT_EQ(d.uncovered_records, 1u);
  EXPECT_NEAR(d.users[0].h1, 2.0, 1e-12);
  EXPECT_EQ(d.users[0].h2, 0.0);
  EXPECT_LT(d.users[0].delta, 0.0);
  EXPECT_EQ(d.users[1].delta, 0.0);
  const auto bounded = cluster_diversity(log, comm, {1, 10}, {36, 45}, {3, 100});
  ASSERT_EQ(bounded.users.size(), 1u);
  EXPECT_EQ(bounded.users[0].user, 1u);
  EXPECT_TRUE(cluster_diversity(log, comm, {1, 10}, {36, 45}, {0, 7}).users.size() == 1);
}

TEST(InterestSeries, LengthAndWindows) {
  const RunResult run = synthetic_run(4, 45, [](std::size_t, int) { return std::uint16_t{0}; },
                                      [](std::size_t u, int t) { return 0.1 * t + 0.01 * double(u); });
  const auto s = interest_entropy_series(run, {1, 10}, {36, 45});
  ASSERT_EQ(s.mean.size(), 46u);
  EXPECT_NEAR(s.first.window_mean, 0.55 + 0.015, 1e-12);
  EXPECT_NEAR(s.first.final_turn, 1.0 + 0.015, 1e-12);
  EXPECT_NEAR(s.last.window_mean, 4.05 + 0.015, 1e-12);
  EXPECT_NEAR(s.stddev[3], run.records[3].std_entropy(), 1e-15);
  EXPECT_THROW(interest_entropy_series(run, {1, 10}, {40, 50}), ConfigError);
}

TEST(InterestSeries, PointMassInterestsGiveZero) {
  const RunResult run =
      synthetic_run(5, 3, [](std::size_t, int) { return std::uint16_t{0}; }, [](std::size_t, int) { return 0.0; });
  EXPECT_EQ(interest_entropy_series(run, {1, 1}, {3, 3}).mean[0], 0.0);
}

TEST(MaxCategoryChange, Bounds) {
  const auto flat = [](std::size_t, int) { return 1.0; };
  const RunResult still = synthetic_run(10, 45, [](std::size_t u, int) { return std::uint16_t(u % 3); }, flat);
  EXPECT_EQ(max_category_change_rate(still, {1, 10}, {36, 45}), 0.0);
  const RunResult flip = synthetic_run(10, 45, [](std::size_t, int t) { return std::uint16_t(t > 20); }, flat);
  EXPECT_EQ(max_category_change_rate(flip, {1, 10}, {36, 45}), 100.0);
  EXPECT_EQ(max_category_change_rate(flip, {36, 45}, {36, 45}), 0.0);
  const RunResult some =
      synthetic_run(8, 45, [](std::size_t u, int t) { return std::uint16_t(u < 2 && t > 20 ? 5 : 1); }, flat);
  EXPECT_EQ(max_category_change_rate(some, {1, 10}, {36, 45}), 25.0);
}

TEST(CohortSplit, RuleApplication) {
  std::vector<UserDiversityRecord> recs;
  const double deltas[] = {+1, +2, -1, -2, -3};
  for (UserId u = 0; u < 5; ++u) recs.push_back({u, 1.0, 1.0 + deltas[u], deltas[u], 0, 0});
  const CohortReport r = cohort_split(recs);
  EXPECT_EQ(r.increasing, (std::vector<UserId>{0, 1}));
  EXPECT_EQ(r.decreasing, (std::vector<UserId>{3, 4}));
  EXPECT_NEAR(r.decreasing_summary.mean_delta, -2.5, 1e-12);
  EXPECT_EQ(r.decreasing_available, 3u);
}

TEST(CohortSplit, TiesByUserIdAndEdgeCases) {
  std::vector<UserDiversityRecord> recs{{5, 0, 0, -1, 0, 0}, {2, 0, 0, -1, 0, 0}, {9, 0, 0, 0.5, 0, 0}};
  EXPECT_EQ(cohort_split(recs).decreasing, std::vector<UserId>{2});

  std::vector<UserDiversityRecord> up{{0, 0, 0, 1, 0, 0}, {1, 0, 0, 2, 0, 0}};
  EXPECT_TRUE(cohort_split(up).decreasing.empty());
  std::vector<UserDiversityRecord> zero{{0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0}};
  const auto z = cohort_split(zero);
  EXPECT_TRUE(z.increasing.empty());
  EXPECT_TRUE(z.decreasing.empty());
  EXPECT_THROW(cohort_split(std::vector<UserDiversityRecord>{{0, 0, 0, 1, 0, 0}}), DataError);
}

TEST(CohortSplit, DisjointEqualSizedAtFullScale) {
  // 355 of 1037 users increasing.
  RngStream rng(6, 0);
  std::vector<UserDiversityRecord> recs;
  for (UserId u = 0; u < 1037; ++u) {
    const double d = u < 355 ? 0.01 + rng.uniform() : -0.01 - rng.uniform();
    recs.push_back({u, 1.0, 1.0 + d, d, 0, 0});
  }
  rng.shuffle(recs);
  const auto r = cohort_split(recs);
  EXPECT_EQ(r.increasing.size(), 355u);
  EXPECT_EQ(r.decreasing.size(), 355u);
  std::vector<UserId> both;
  std::set_intersection(r.increasing.begin(), r.increasing.end(), r.decreasing.begin(), r.decreasing.end(),
                        std::back_inserter(both));
  EXPECT_TRUE(both.empty());
  // decreasing are the most negative
  double smallest_kept = 1e9, largest_dropped = 0.0;
  for (const auto& x : recs) {
    if (x.delta >= 0) continue;
    if (std::binary_search(r.decreasing.begin(), r.decreasing.end(), x.user)) {
      smallest_kept = std::min(smallest_kept, -x.delta);
    } else {
      largest_dropped = std::max(largest_dropped, -x.delta);
    }
  }
  EXPECT_GE(smallest_kept, largest_dropped);
}

TEST(AffinityDiff, Examples) {
  CohortReport cohorts;
  cohorts.increasing = {1, 2};
  cohorts.decreasing = {3, 4};
  const CommunityMap comm{{10, 0}, {11, 1}};
  const BrowseLog log({{1, 10, 1}, {2, 10, 1}, {1, 11, 1}, {3, 11, 1}, {4, 11, 2}});
  const auto aff = cluster_affinity_diff(log, comm, cohorts);
  ASSERT_EQ(aff.size(), 2u);
  EXPECT_EQ(aff[0].community, 0u);
  EXPECT_EQ(aff[0].difference, 1.0);
  EXPECT_EQ(aff[1].difference, -0.5);

  const BrowseLog same({{1, 10, 1}, {2, 11, 1}, {3, 10, 1}, {4, 11, 1}});
  for (const auto& a : cluster_affinity_diff(same, comm, cohorts)) EXPECT_EQ(a.difference, 0.0);
  EXPECT_THROW(cluster_affinity_diff(log, comm, CohortReport{}), DataError);
}

TEST(AffinityDiff, PlantedBiasRecovered) {
  RngStream rng(12, 0);
  CohortReport cohorts;
  std::vector<BrowseRecord> recs;
  const CommunityMap comm{{0, 0}, {1, 1}};
  int inc_hits = 0, dec_hits = 0;
  for (UserId u = 0; u < 2000; ++u) {
    const bool inc = u < 1000;
    (inc ? cohorts.increasing : cohorts.decreasing).push_back(u);
    recs.push_back({u, 1, 1});
    if (rng.uniform() < (inc ? 0.8 : 0.2)) {
      recs.push_back({u, 0, 1});
      (inc ? inc_hits : dec_hits) += 1;
    }
  }
  const auto aff = cluster_affinity_diff(BrowseLog(recs), comm, cohorts);
  ASSERT_EQ(aff[0].community, 0u);
  // direct counting oracle
  EXPECT_DOUBLE_EQ(aff[0].difference, inc_hits / 1000.0 - dec_hits / 1000.0);
  EXPECT_NEAR(aff[0].difference, 0.6, 4 * std::sqrt(0.16 / 1000 * 2));
}

TEST(ScenarioSummary, AggregatesRuns) {
  BatchResult batch;
  batch.config.turns = 45;
  batch.runs.push_back(synthetic_run(4, 45, [](std::size_t, int t) { return std::uint16_t(t > 20); },
                                     [](std::size_t, int) { return 2.0; }));
  batch.runs.push_back(synthetic_run(4, 45, [](std::size_t, int) { return std::uint16_t{0}; },
                                     [](std::size_t, int t) { return t < 20 ? 3.0 : 1.0; }));
  const auto s = summarize_scenario(batch);
  EXPECT_EQ(s.runs, 2);
  EXPECT_DOUBLE_EQ(s.ace_initial, 2.5);
  EXPECT_DOUBLE_EQ(s.ace_first, 2.5);
  EXPECT_DOUBLE_EQ(s.ace_last, 1.5);
  EXPECT_DOUBLE_EQ(s.mcc, 50.0);
  EXPECT_DOUBLE_EQ(s.high_bias_fraction, 0.5);
  EXPECT_DOUBLE_EQ(s.mean_reads, 5.0);
  EXPECT_EQ(s.mcc_runs, (std::vector<double>{100.0, 0.0}));
}
