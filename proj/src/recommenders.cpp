#include "newsflow/recommenders.hpp"

#include <algorithm>

namespace newsflow {

CategoryVector user_profile(const UserAgent& user, const std::vector<Article>& articles, std::size_t n_categories) {
  std::vector<double> sum(n_categories, 0.0);
  for (const auto& h : user.history()) {
    const auto& topic = articles[h.article].topic;
    for (std::size_t i = 0; i < n_categories; ++i) sum[i] += topic[i];
  }
  return CategoryVector(std::move(sum));
}

bool ranks_before(const ScoredArticle& a, const ScoredArticle& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  if (a.published_day != b.published_day) return a.published_day > b.published_day;
  return a.id < b.id;
}

std::vector<ArticleId> top_k(std::vector<ScoredArticle> scored, std::size_t k) {
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), ranks_before);
  std::vector<ArticleId> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].id);
  return out;
}

void backfill_unread(std::vector<ArticleId>& out, std::size_t k, const UserAgent& user,
                     std::span<const ArticleId> pool, RngStream& rng) {
  if (out.size() >= k || pool.empty()) return;
  auto taken = [&](ArticleId a) { return user.has_read(a) || std::find(out.begin(), out.end(), a) != out.end(); };

  // Rejection sampling is cheap while most of the pool is eligible.
  std::size_t misses = 0;
  while (out.size() < k && misses < 64) {
    const ArticleId a = pool[rng.below(pool.size())];
    if (taken(a)) {
      ++misses;
    } else {
      out.push_back(a);
      misses = 0;
    }
  }
  if (out.size() >= k) return;

  std::vector<ArticleId> eligible;
  for (ArticleId a : pool) {
    if (!taken(a)) eligible.push_back(a);
  }
  for (std::size_t i : rng.sample_indices(eligible.size(), k - out.size())) out.push_back(eligible[i]);
}

std::vector<ArticleId> recommend_content(const UserAgent& user, const CategoryVector& profile,
                                         const std::vector<Article>& articles, std::span<const ArticleId> pool,
                                         std::size_t k, RngStream& rng) {
  std::vector<ArticleId> out;
  if (user.history().empty() || !(profile.sum() > 0.0)) {
    backfill_unread(out, k, user, pool, rng);
    return out;
  }
  const CategoryVector p = normalize(profile);
  std::vector<ScoredArticle> scored;
  scored.reserve(pool.size());
  for (ArticleId a : pool) {
    if (user.has_read(a)) continue;
    const Article& art = articles[a];
    scored.push_back({dot(p.data(), art.topic.data(), p.size()), art.published_day, a});
  }
  out = top_k(std::move(scored), k);
  backfill_unread(out, k, user, pool, rng);
  return out;
}

std::vector<std::vector<Neighbor>> collaborative_neighbors(const std::vector<UserAgent>& users,
                                                           const std::vector<Article>& articles,
                                                           std::size_t n_neighbors) {
  const std::size_t n = users.size();
  std::vector<std::vector<Neighbor>> result(n);
  std::vector<std::uint32_t> shared(n, 0);
  std::vector<UserId> touched;

  for (std::size_t u = 0; u < n; ++u) {
    const auto& mine = users[u].history();
    if (mine.empty()) continue;
    // Overlap counts through the article -> readers inverted index.
    for (const auto& h : mine) {
      for (UserId v : articles[h.article].readers) {
        if (v == u) continue;
        if (shared[v]++ == 0) touched.push_back(v);
      }
    }
    std::vector<Neighbor> cands;
    cands.reserve(touched.size());
    for (UserId v : touched) {
      cands.push_back({v, simpson_from_counts(shared[v], mine.size(), users[v].history().size())});
      shared[v] = 0;
    }
    touched.clear();
    const auto better = [](const Neighbor& a, const Neighbor& b) {
      return a.similarity != b.similarity ? a.similarity > b.similarity : a.user < b.user;
    };
    const std::size_t keep = std::min(n_neighbors, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(), better);
    cands.resize(keep);
    result[u] = std::move(cands);
  }
  return result;
}

std::vector<ArticleId> recommend_collaborative(const UserAgent& user, std::span<const Neighbor> neighbors,
                                               const std::vector<UserAgent>& users,
                                               const std::vector<Article>& articles,
                                               std::span<const ArticleId> pool, std::size_t k, RngStream& rng) {
  std::vector<ArticleId> seen;
  for (const auto& nb : neighbors) {
    for (const auto& h : users[nb.user].history()) {
      if (user.has_read(h.article)) continue;
      if (!std::binary_search(pool.begin(), pool.end(), h.article)) continue;
      seen.push_back(h.article);
    }
  }
  std::sort(seen.begin(), seen.end());
  std::vector<ScoredArticle> scored;
  for (std::size_t i = 0; i < seen.size();) {
    std::size_t j = i;
    while (j < seen.size() && seen[j] == seen[i]) ++j;
    scored.push_back({static_cast<double>(j - i), articles[seen[i]].published_day, seen[i]});
    i = j;
  }
  std::vector<ArticleId> out = top_k(std::move(scored), k);
  backfill_unread(out, k, user, pool, rng);
  return out;
}

std::vector<ArticleId> recommend_nonrec(const UserAgent& user, std::span<const ArticleId> todays,
                                        const std::vector<Article>& articles, std::size_t shortlist,
                                        std::size_t k, RngStream& rng) {
  std::vector<ScoredArticle> scored;
  scored.reserve(todays.size());
  const auto& interest = user.interest();
  for (ArticleId a : todays) {
    if (user.has_read(a)) continue;
    const Article& art = articles[a];
    scored.push_back({dot(interest.data(), art.topic.data(), interest.size()), art.published_day, a});
  }
  const std::vector<ArticleId> best = top_k(std::move(scored), shortlist);
  std::vector<ArticleId> out;
  for (std::size_t i : rng.sample_indices(best.size(), std::min(k, best.size()))) out.push_back(best[i]);
  return out;
}

std::vector<ArticleId> recommend_all(std::span<const ArticleId> pool) {
  return {pool.begin(), pool.end()};
}

namespace {

std::vector<ArticleId> pool_vector(const World& world) { return world.pool; }

class ContentRecommender final : public Recommender {
 public:
  RecommenderKind kind() const noexcept override { return RecommenderKind::ContentBase; }
  void prepare(const World& world) override {
    pool_ = pool_vector(world);
    profiles_.clear();
    profiles_.reserve(world.users.size());
    const auto n = static_cast<std::size_t>(world.config.n_categories);
    for (const auto& u : world.users) profiles_.push_back(user_profile(u, world.articles, n));
  }
  std::vector<ArticleId> recommend(const World& world, const UserAgent& user, std::size_t k,
                                   RngStream& rng) const override {
    return recommend_content(user, profiles_[user.id()], world.articles, pool_, k, rng);
  }

 private:
  std::vector<ArticleId> pool_;
  std::vector<CategoryVector> profiles_;
};

class CollaborativeRecommender final : public Recommender {
 public:
  RecommenderKind kind() const noexcept override { return RecommenderKind::Collaborative; }
  void prepare(const World& world) override {
    pool_ = pool_vector(world);
    neighbors_ = collaborative_neighbors(world.users, world.articles,
                                         static_cast<std::size_t>(world.config.cf_neighbors));
  }
  std::vector<ArticleId> recommend(const World& world, const UserAgent& user, std::size_t k,
                                   RngStream& rng) const override {
    return recommend_collaborative(user, neighbors_[user.id()], world.users, world.articles, pool_, k, rng);
  }

 private:
  std::vector<ArticleId> pool_;
  std::vector<std::vector<Neighbor>> neighbors_;
};

class NonRecommender final : public Recommender {
 public:
  RecommenderKind kind() const noexcept override { return RecommenderKind::NonRecommendation; }
  void prepare(const World& world) override {
    todays_ = world.todays_articles();
    shortlist_ = static_cast<std::size_t>(world.config.nonrec_shortlist);
  }
  std::vector<ArticleId> recommend(const World& world, const UserAgent& user, std::size_t k,
                                   RngStream& rng) const override {
    return recommend_nonrec(user, todays_, world.articles, shortlist_, k, rng);
  }

 private:
  std::vector<ArticleId> todays_;
  std::size_t shortlist_ = 100;
};

class AllRecommender final : public Recommender {
 public:
  RecommenderKind kind() const noexcept override { return RecommenderKind::All; }
  void prepare(const World& world) override { pool_ = pool_vector(world); }
  std::vector<ArticleId> recommend(const World&, const UserAgent&, std::size_t, RngStream&) const override {
    return pool_;
  }
  bool replaces_slate() const noexcept override { return true; }

 private:
  std::vector<ArticleId> pool_;
};

}  // namespace

std::unique_ptr<Recommender> make_recommender(RecommenderKind kind) {
  switch (kind) {
    case RecommenderKind::ContentBase: return std::make_unique<ContentRecommender>();
    case RecommenderKind::Collaborative: return std::make_unique<CollaborativeRecommender>();
    case RecommenderKind::NonRecommendation: return std::make_unique<NonRecommender>();
    case RecommenderKind::All: return std::make_unique<AllRecommender>();
  }
  throw ConfigError("recommender: unsupported kind");
}

}  // namespace newsflow
