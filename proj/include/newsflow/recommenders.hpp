#pragma once

#include <memory>
#include <span>
#include <vector>

#include "newsflow/model.hpp"

namespace newsflow {

/// Sum of the topics of every article in the user's history (unnormalized).
CategoryVector user_profile(const UserAgent& user, const std::vector<Article>& articles, std::size_t n_categories);

// Ordering used for every ranked list: higher score, then newer publication
// day, then lower id.
struct ScoredArticle {
  double score = 0.0;
  int published_day = 0;
  ArticleId id = 0;
};
bool ranks_before(const ScoredArticle& a, const ScoredArticle& b) noexcept;

// Top-k article ids from `scored` under ranks_before().
std::vector<ArticleId> top_k(std::vector<ScoredArticle> scored, std::size_t k);

// Appends up to `k - out.size()` uniformly drawn pool articles that are
// unread by `user` and not already in `out`.
void backfill_unread(std::vector<ArticleId>& out, std::size_t k, const UserAgent& user,
                     std::span<const ArticleId> pool, RngStream& rng);

std::vector<ArticleId> recommend_content(const UserAgent& user, const CategoryVector& profile,
                                         const std::vector<Article>& articles, std::span<const ArticleId> pool,
                                         std::size_t k, RngStream& rng);

/// Neighbors of one user: top-n others by Simpson overlap of full read sets.
/// Users with empty histories and zero-overlap users are never neighbors.
struct Neighbor {
  UserId user = 0;
  double similarity = 0.0;
};
std::vector<std::vector<Neighbor>> collaborative_neighbors(const std::vector<UserAgent>& users,
                                                           const std::vector<Article>& articles,
                                                           std::size_t n_neighbors);

std::vector<ArticleId> recommend_collaborative(const UserAgent& user, std::span<const Neighbor> neighbors,
                                               const std::vector<UserAgent>& users,
                                               const std::vector<Article>& articles,
                                               std::span<const ArticleId> pool, std::size_t k, RngStream& rng);

std::vector<ArticleId> recommend_nonrec(const UserAgent& user, std::span<const ArticleId> todays,
                                        const std::vector<Article>& articles, std::size_t shortlist,
                                        std::size_t k, RngStream& rng);

std::vector<ArticleId> recommend_all(std::span<const ArticleId> pool);

/// One strategy behind a per-turn interface. prepare() runs once per turn
/// before any user selects; recommend() must then be safe to call
/// concurrently for distinct users.
class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual RecommenderKind kind() const noexcept = 0;
  virtual void prepare(const World& world) = 0;
  virtual std::vector<ArticleId> recommend(const World& world, const UserAgent& user, std::size_t k,
                                           RngStream& rng) const = 0;
  // True when the strategy's output is the whole slate (no shared top list).
  virtual bool replaces_slate() const noexcept { return false; }
};

std::unique_ptr<Recommender> make_recommender(RecommenderKind kind);

}  // namespace newsflow
