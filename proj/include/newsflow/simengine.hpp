#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "newsflow/model.hpp"
#include "newsflow/recommenders.hpp"

namespace newsflow {

/// Draw a topic/interest vector according to `dist`.
CategoryVector random_category_vector(std::size_t n, InitDistribution dist, RngStream& rng);

/// Weighted sampling without replacement; each draw picks index i with
/// probability w_i / sum of the remaining weights.
class RouletteWheel {
 public:
  explicit RouletteWheel(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double total() const noexcept { return prefix_.empty() ? 0.0 : prefix_.back(); }
  // nullopt when every remaining weight is zero.
  std::optional<std::size_t> draw(RngStream& rng) const;
  void remove(std::size_t i);

 private:
  void rebuild();
  std::vector<double> weights_;
  std::vector<double> prefix_;
};

World init_world(const SimConfig& config, std::uint64_t seed);

// Appends articles_per_day new articles stamped with world.day, then evicts
// the oldest until the pool holds at most pool_size.
void spawn_articles(World& world);

std::vector<ArticleId> present_top(World& world);

std::vector<ArticleId> assemble_slate(const World& world, const UserAgent& user, const Recommender& recommender,
                                      std::span<const ArticleId> top, RngStream& rng);

/// Elite phase then roulette phase, both gated by the evaluation threshold.
/// Returns the ids read this turn in selection order.
std::vector<ArticleId> select_articles(const UserAgent& user, std::span<const ArticleId> slate,
                                       const std::vector<Article>& articles, const SimConfig& config,
                                       RngStream& rng);

CategoryVector update_interest(const CategoryVector& old, std::span<const CategoryVector* const> read_topics,
                               double w, double r);

TurnRecord make_turn_record(const World& world);

// Runs one full turn. `workers` bounds the threads used for the per-user phase;
// the outcome does not depend on it.
TurnRecord step(World& world, Recommender& recommender, int workers = 1);

struct RunResult {
  std::uint64_t seed = 0;
  RecommenderKind recommender = RecommenderKind::Collaborative;
  // records[0] is the initial state, records[t] the state after turn t.
  std::vector<TurnRecord> records;
  std::size_t total_reads = 0;
  std::size_t articles_created = 0;
};

struct BatchResult {
  SimConfig config;
  std::vector<RunResult> runs;
  // Across-run mean and standard deviation of per-turn mean entropy.
  std::vector<double> entropy_mean;
  std::vector<double> entropy_std;
};

std::uint64_t run_seed(std::uint64_t base_seed, int run_index) noexcept;

RunResult run(const SimConfig& config, int workers = 1);
RunResult run_with_seed(const SimConfig& config, std::uint64_t seed, int workers = 1);
BatchResult run_batch(const SimConfig& config, int workers = 1);

// Calls fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace newsflow
