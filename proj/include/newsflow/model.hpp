#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "newsflow/core.hpp"
#include "newsflow/rng.hpp"

namespace newsflow {

enum class RecommenderKind { ContentBase, Collaborative, NonRecommendation, All };

inline constexpr RecommenderKind kAllRecommenderKinds[] = {
    RecommenderKind::ContentBase, RecommenderKind::Collaborative, RecommenderKind::NonRecommendation,
    RecommenderKind::All};

std::string_view to_string(RecommenderKind kind);
// Accepts the display names ("ContentBase") and the short CLI tags
// ("content", "collaborative", "nonrec", "all"), case-insensitively.
RecommenderKind parse_recommender(std::string_view text);

// How initial interests and new article topics are drawn.
//   Simplex:  uniform on the probability simplex (sorted-uniform spacings).
//   UnitCube: i.i.d. uniform(0,1) per category, then normalized.
enum class InitDistribution { Simplex, UnitCube };
std::string_view to_string(InitDistribution d);
InitDistribution parse_init_distribution(std::string_view text);

/// Inclusive range of turns.
struct PeriodWindow {
  int start = 1;
  int end = 1;

  bool contains(int turn) const noexcept { return turn >= start && turn <= end; }
  int length() const noexcept { return end - start + 1; }
  bool overlaps(const PeriodWindow& o) const noexcept { return start <= o.end && o.start <= end; }
  friend bool operator==(const PeriodWindow&, const PeriodWindow&) = default;
};

struct SimConfig {
  int turns = 45;
  int runs = 20;
  int n_users = 1000;
  int n_categories = 20;
  int pool_size = 5000;
  int articles_per_day = 1500;
  int presented_per_day = 100;
  int top_per_day = 50;
  int reads_per_day = 10;
  int elite_reads = 3;
  int cf_neighbors = 20;
  int nonrec_shortlist = 100;
  double threshold = 0.055;
  double w = 5.0;
  double r = 0.5;
  int max_failed_draws = 10;
  // Share of the individual slots filled with uniform random unread articles
  // instead of recommender output.
  double random_admixture = 0.0;
  RecommenderKind recommender = RecommenderKind::Collaborative;
  InitDistribution init_distribution = InitDistribution::Simplex;
  std::uint64_t seed = 20170601;
  // Category whose per-user share is tracked turn by turn.
  int watch_category = 0;
  // Analysis windows; zero-length (start=end=0) means "derive from turns".
  PeriodWindow first_window{0, 0};
  PeriodWindow last_window{0, 0};

  int individual_per_day() const noexcept { return presented_per_day - top_per_day; }

  // Throws ConfigError naming the offending field.
  void validate() const;

  PeriodWindow resolved_first_window() const;
  PeriodWindow resolved_last_window() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Article {
  ArticleId id = 0;
  int published_day = 0;
  CategoryVector topic;
  std::vector<UserId> readers;
};

struct HistoryEntry {
  int turn = 0;
  ArticleId article = 0;
};

class UserAgent {
 public:
  UserAgent(UserId id, CategoryVector interest) : id_(id), interest_(std::move(interest)) {}

  UserId id() const noexcept { return id_; }
  const CategoryVector& interest() const noexcept { return interest_; }
  void set_interest(CategoryVector v) { interest_ = std::move(v); }

  const std::vector<HistoryEntry>& history() const noexcept { return history_; }
  const std::vector<ArticleId>& reads_today() const noexcept { return reads_today_; }

  bool has_read(ArticleId a) const noexcept { return a < read_mask_.size() && read_mask_[a]; }
  std::size_t read_count() const noexcept { return history_.size(); }

  // Sorted, duplicate-free set of every article in the history.
  std::vector<ArticleId> read_set() const;

  void begin_turn() { reads_today_.clear(); }
  // Throws ContractError on a re-read.
  void record_read(int turn, ArticleId article);

 private:
  UserId id_;
  CategoryVector interest_;
  std::vector<HistoryEntry> history_;
  std::vector<ArticleId> reads_today_;
  std::vector<bool> read_mask_;
};

/// Per-turn snapshot of every user after the interest update.
struct TurnRecord {
  int day = 0;
  std::vector<double> entropy;
  std::vector<std::uint16_t> argmax;
  std::vector<double> watch_share;
  std::vector<double> max_share;
  std::vector<std::uint16_t> reads;

  std::size_t user_count() const noexcept { return entropy.size(); }
  double mean_entropy() const;
  double std_entropy() const;
  double mean_reads() const;
};

struct World {
  SimConfig config;
  int day = 0;
  // Ids are assigned in creation order, so the pool (newest last) is always a
  // contiguous id range.
  std::vector<ArticleId> pool;
  std::vector<Article> articles;
  std::vector<UserAgent> users;
  std::vector<TurnRecord> records;
  RngStream rng;
  std::vector<RngStream> user_rngs;
  // First id spawned on the current day.
  ArticleId todays_first = 0;

  World(SimConfig cfg, std::uint64_t seed);

  bool in_pool(ArticleId a) const noexcept { return !pool.empty() && a >= pool.front() && a <= pool.back(); }
  const Article& article(ArticleId a) const { return articles[a]; }
  // Ids spawned on the current day (empty before the first step).
  std::vector<ArticleId> todays_articles() const;
};

}  // namespace newsflow
