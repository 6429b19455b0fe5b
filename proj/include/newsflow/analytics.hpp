#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "newsflow/graphcluster.hpp"
#include "newsflow/model.hpp"
#include "newsflow/simengine.hpp"

namespace newsflow {

// article id -> community id
using CommunityMap = std::map<ArticleId, std::uint32_t>;

CommunityMap community_map(const ArticleGraph& graph, const Partition& partition);

/// Entropy (bits) of a user's in-window reads over communities. nullopt when
/// the user has no clustered read in the window.
std::optional<double> cluster_entropy(const BrowseLog& log, const CommunityMap& communities, PeriodWindow window,
                                      UserId user);

struct UserDiversityRecord {
  UserId user = 0;
  double h1 = 0.0;
  double h2 = 0.0;
  double delta = 0.0;  // h2 - h1
  std::uint32_t argmax1 = 0;
  std::uint32_t argmax2 = 0;
};

struct ReadBounds {
  std::size_t min_reads = 0;
  std::size_t max_reads = static_cast<std::size_t>(-1);
};

struct ClusterDiversity {
  std::vector<UserDiversityRecord> users;
  // Log records whose article has no community.
  std::size_t uncovered_records = 0;
};

/// Per-user cluster entropy in both windows. A user is kept when its reads
/// inside the two windows fall within `bounds` and it has a clustered read in
/// each window. argmax is the most-read community (ties: lowest id).
ClusterDiversity cluster_diversity(const BrowseLog& log, const CommunityMap& communities, PeriodWindow first,
                                   PeriodWindow last, ReadBounds bounds = {});

struct WindowAggregate {
  double window_mean = 0.0;  // mean over the window's turns of the per-turn mean
  double final_turn = 0.0;   // per-turn mean at the window's last turn
};

struct EntropySeries {
  std::vector<double> mean;  // index = turn, 0 = initial state
  std::vector<double> stddev;
  WindowAggregate first;
  WindowAggregate last;
};

EntropySeries interest_entropy_series(const RunResult& run, PeriodWindow first, PeriodWindow last);

/// Percent of users whose interest argmax at the end of `first` differs from
/// the one at the end of `last`.
double max_category_change_rate(const RunResult& run, PeriodWindow first, PeriodWindow last);

/// Per-user interest-entropy diversity: window means of entropy, argmax at
/// each window's last turn.
std::vector<UserDiversityRecord> interest_diversity(const RunResult& run, PeriodWindow first, PeriodWindow last);

// Fraction of users whose largest interest share exceeds `cut`.
double fraction_max_share_above(const TurnRecord& record, double cut = 0.5);

struct CohortSummary {
  std::size_t size = 0;
  double mean_h1 = 0.0;
  double mean_h2 = 0.0;
  double mean_delta = 0.0;
};

struct CohortReport {
  std::vector<UserId> increasing;
  std::vector<UserId> decreasing;
  CohortSummary increasing_summary;
  CohortSummary decreasing_summary;
  std::size_t total_users = 0;
  std::size_t decreasing_available = 0;
};

/// Increasing cohort: every positive delta. Decreasing cohort: the same
/// number of most-negative deltas (ties by lower user id). Throws DataError
/// for fewer than two records.
CohortReport cohort_split(std::span<const UserDiversityRecord> records);

struct CommunityAffinity {
  std::uint32_t community = 0;
  double increasing_fraction = 0.0;
  double decreasing_fraction = 0.0;
  double difference = 0.0;  // increasing - decreasing
};

/// Communities ranked by |difference| (ties by lower community id).
std::vector<CommunityAffinity> cluster_affinity_diff(const BrowseLog& log, const CommunityMap& communities,
                                                     const CohortReport& cohorts);

struct ScenarioSummary {
  RecommenderKind scenario = RecommenderKind::Collaborative;
  int runs = 0;
  PeriodWindow first_window;
  PeriodWindow last_window;
  // Across-run means; the *_runs vectors hold the per-run values.
  double ace_initial = 0.0;
  double ace_first = 0.0;
  double ace_last = 0.0;
  double ace_first_final = 0.0;
  double ace_last_final = 0.0;
  double mcc = 0.0;
  double high_bias_fraction = 0.0;
  double mean_reads = 0.0;
  std::vector<double> ace_initial_runs;
  std::vector<double> ace_first_runs;
  std::vector<double> ace_last_runs;
  std::vector<double> mcc_runs;
  std::vector<double> high_bias_runs;
};

ScenarioSummary summarize_scenario(const BatchResult& batch);

}  // namespace newsflow
