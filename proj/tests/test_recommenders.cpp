#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "newsflow/recommenders.hpp"
#include "newsflow/simengine.hpp"

using namespace newsflow;

namespace {

std::vector<Article> make_articles(const std::vector<CategoryVector>& topics, int day = 0) {
  std::vector<Article> out;
  for (std::size_t i = 0; i < topics.size(); ++i) out.push_back({static_cast<ArticleId>(i), day, topics[i], {}});
  return out;
}

std::vector<ArticleId> iota_ids(std::size_t n, ArticleId from = 0) {
  std::vector<ArticleId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = from + static_cast<ArticleId>(i);
  return v;
}

void read(UserAgent& u, std::vector<Article>& arts, std::initializer_list<ArticleId> ids) {
  for (ArticleId a : ids) {
    u.record_read(1, a);
    arts[a].readers.push_back(u.id());
  }
}

}  // namespace

TEST(TopK, TieRule) {
  std::vector<ScoredArticle> s{{0.5, 1, 9}, {0.5, 2, 12}, {0.5, 2, 10}, {0.7, 0, 3}};
  EXPECT_EQ(top_k(s, 4), (std::vector<ArticleId>{3, 10, 12, 9}));
  EXPECT_EQ(top_k(s, 2), (std::vector<ArticleId>{3, 10}));
}

TEST(ContentBase, OneHotHistoryRanksByThatCategory) {
  RngStream gen(3, 0);
  std::vector<CategoryVector> topics{{1.0, 0.0, 0.0}};
  for (int i = 0; i < 40; ++i) topics.push_back(random_category_vector(3, InitDistribution::Simplex, gen));
  auto arts = make_articles(topics);
  UserAgent u(0, CategoryVector::uniform(3));
  read(u, arts, {0});
  const auto profile = user_profile(u, arts, 3);
  RngStream rng(1, 0);
  const auto pool = iota_ids(arts.size());
  const auto out = recommend_content(u, profile, arts, pool, 10, rng);
  ASSERT_EQ(out.size(), 10u);
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_GE(arts[out[i - 1]].topic[0], arts[out[i]].topic[0]);
  EXPECT_EQ(std::find(out.begin(), out.end(), 0u), out.end());
  // permutation-stable
  RngStream rng2(2, 0);
  EXPECT_EQ(out, recommend_content(u, profile, arts, pool, 10, rng2));
}

TEST(ContentBase, MatchesBruteForceSort) {
  auto arts = make_articles({{0.2, 0.8}, {0.9, 0.1}, {0.5, 0.5}, {1.0, 0.0}});
  UserAgent u(0, {0.5, 0.5});
  read(u, arts, {3});
  arts[3].topic = CategoryVector({2.0, 1.0});  // profile [2,1]
  const auto profile = user_profile(u, arts, 2);
  EXPECT_EQ(profile, CategoryVector({2.0, 1.0}));
  RngStream rng(1, 0);
  const auto out = recommend_content(u, profile, arts, iota_ids(4), 3, rng);
  std::vector<std::pair<double, ArticleId>> oracle;
  for (ArticleId a : {0u, 1u, 2u}) oracle.push_back({-(2.0 * arts[a].topic[0] + 1.0 * arts[a].topic[1]), a});
  std::sort(oracle.begin(), oracle.end());
  EXPECT_EQ(out, (std::vector<ArticleId>{oracle[0].second, oracle[1].second, oracle[2].second}));
}

TEST(ContentBase, ColdStartIsRandomUnread) {
  auto arts = make_articles(std::vector<CategoryVector>(30, CategoryVector::uniform(2)));
  UserAgent u(0, {0.5, 0.5});
  RngStream a(1, 0), b(2, 0);
  const auto pool = iota_ids(30);
  const auto x = recommend_content(u, CategoryVector::zeros(2), arts, pool, 10, a);
  const auto y = recommend_content(u, CategoryVector::zeros(2), arts, pool, 10, b);
  EXPECT_EQ(x.size(), 10u);
  EXPECT_EQ(std::set<ArticleId>(x.begin(), x.end()).size(), 10u);
  EXPECT_NE(x, y);
}

TEST(Collaborative, HandExample) {
  // u1 read {a,b}, u2 read {a,b,c}, u3 read {d}: neighbor of u1 is u2, recommend c.
  auto arts = make_articles(std::vector<CategoryVector>(6, CategoryVector::uniform(2)));
  std::vector<UserAgent> users{UserAgent(0, {0.5, 0.5}), UserAgent(1, {0.5, 0.5}), UserAgent(2, {0.5, 0.5})};
  read(users[0], arts, {0, 1});
  read(users[1], arts, {0, 1, 2});
  read(users[2], arts, {3});
  const auto nb = collaborative_neighbors(users, arts, 1);
  ASSERT_EQ(nb[0].size(), 1u);
  EXPECT_EQ(nb[0][0].user, 1u);
  EXPECT_DOUBLE_EQ(nb[0][0].similarity, 1.0);
  EXPECT_TRUE(nb[2].empty());  // no overlap with anyone
  RngStream rng(1, 0);
  const auto out = recommend_collaborative(users[0], nb[0], users, arts, iota_ids(6), 1, rng);
  EXPECT_EQ(out, std::vector<ArticleId>{2});
}

TEST(Collaborative, IdenticalHistoriesFallBackToRandom) {
  auto arts = make_articles(std::vector<CategoryVector>(20, CategoryVector::uniform(2)));
  std::vector<UserAgent> users;
  for (UserId i = 0; i < 4; ++i) {
    users.emplace_back(i, CategoryVector{0.5, 0.5});
    read(users.back(), arts, {0, 1, 2});
  }
  const auto nb = collaborative_neighbors(users, arts, 3);
  EXPECT_EQ(nb[0].size(), 3u);
  RngStream rng(5, 0);
  const auto out = recommend_collaborative(users[0], nb[0], users, arts, iota_ids(20), 5, rng);
  EXPECT_EQ(out.size(), 5u);
  for (ArticleId a : out) EXPECT_GE(a, 3u);
}

TEST(Collaborative, ColdStartHasNoNeighbors) {
  auto arts = make_articles(std::vector<CategoryVector>(20, CategoryVector::uniform(2)));
  std::vector<UserAgent> users{UserAgent(0, {0.5, 0.5}), UserAgent(1, {0.5, 0.5})};
  read(users[1], arts, {4});
  const auto nb = collaborative_neighbors(users, arts, 5);
  EXPECT_TRUE(nb[0].empty());
  RngStream rng(5, 0);
  EXPECT_EQ(recommend_collaborative(users[0], nb[0], users, arts, iota_ids(20), 7, rng).size(), 7u);
}

TEST(Collaborative, SimilarityIsSymmetricAndMatchesBruteForce) {
  World world = init_world([] {
    SimConfig c;
    c.n_users = 40;
    c.n_categories = 5;
    c.pool_size = 300;
    c.articles_per_day = 100;
    c.presented_per_day = 30;
    c.top_per_day = 15;
    c.cf_neighbors = 40;
    return c;
  }(), 3);
  auto rec = make_recommender(RecommenderKind::Collaborative);
  for (int t = 0; t < 3; ++t) step(world, *rec, 1);
  const auto nb = collaborative_neighbors(world.users, world.articles, 40);
  auto sim_of = [&](UserId u, UserId v) {
    for (const auto& n : nb[u]) {
      if (n.user == v) return n.similarity;
    }
    return 0.0;
  };
  for (UserId u = 0; u < 40; ++u) {
    for (UserId v = 0; v < 40; ++v) {
      if (u == v) continue;
      const auto a = world.users[u].read_set(), b = world.users[v].read_set();
      EXPECT_DOUBLE_EQ(sim_of(u, v), simpson(a, b));
      EXPECT_DOUBLE_EQ(sim_of(u, v), sim_of(v, u));
    }
  }
}

TEST(NonRec, ContainmentAndSmallDay) {
  RngStream gen(9, 0);
  std::vector<CategoryVector> topics;
  for (int i = 0; i < 300; ++i) topics.push_back(random_category_vector(4, InitDistribution::Simplex, gen));
  auto arts = make_articles(topics);
  UserAgent u(0, {1.0, 0.0, 0.0, 0.0});
  const auto todays = iota_ids(300);
  RngStream rng(1, 0);
  const auto out = recommend_nonrec(u, todays, arts, 100, 50, rng);
  ASSERT_EQ(out.size(), 50u);
  // Oracle: the 100 largest category-0 weights.
  std::vector<std::pair<double, ArticleId>> by_weight;
  for (ArticleId a : todays) by_weight.push_back({-arts[a].topic[0], a});
  std::sort(by_weight.begin(), by_weight.end());
  std::set<ArticleId> best;
  for (int i = 0; i < 100; ++i) best.insert(by_weight[i].second);
  for (ArticleId a : out) EXPECT_TRUE(best.count(a));
  EXPECT_EQ(std::set<ArticleId>(out.begin(), out.end()).size(), 50u);

  const auto sixty = iota_ids(60);
  const auto small = recommend_nonrec(u, sixty, arts, 100, 50, rng);
  EXPECT_EQ(small.size(), 50u);
  for (ArticleId a : small) EXPECT_LT(a, 60u);
}

TEST(All, ReturnsPoolExactly) {
  const auto pool = iota_ids(5000, 100);
  EXPECT_EQ(recommend_all(pool), pool);
  EXPECT_EQ(recommend_all(pool), recommend_all(pool));
}

TEST(Strategies, NeverRecommendReadArticles) {
  SimConfig c;
  c.n_users = 30;
  c.n_categories = 6;
  c.pool_size = 200;
  c.articles_per_day = 60;
  c.presented_per_day = 40;
  c.top_per_day = 10;
  c.cf_neighbors = 5;
  c.nonrec_shortlist = 30;
  c.threshold = 0.0;
  for (RecommenderKind kind :
       {RecommenderKind::ContentBase, RecommenderKind::Collaborative, RecommenderKind::NonRecommendation}) {
    c.recommender = kind;
    World world = init_world(c, 12);
    auto rec = make_recommender(kind);
    for (int t = 0; t < 4; ++t) {
      step(world, *rec, 1);
      rec->prepare(world);
      for (const auto& u : world.users) {
        RngStream rng(u.id(), 5);
        for (ArticleId a : rec->recommend(world, u, 30, rng)) {
          ASSERT_FALSE(u.has_read(a)) << to_string(kind);
          ASSERT_TRUE(world.in_pool(a));
        }
      }
    }
  }
}

TEST(ParseRecommender, AcceptsTags) {
  EXPECT_EQ(parse_recommender("content"), RecommenderKind::ContentBase);
  EXPECT_EQ(parse_recommender("ContentBase"), RecommenderKind::ContentBase);
  EXPECT_EQ(parse_recommender("CF"), RecommenderKind::Collaborative);
  EXPECT_EQ(parse_recommender("nonrec"), RecommenderKind::NonRecommendation);
  EXPECT_EQ(parse_recommender("all"), RecommenderKind::All);
  EXPECT_THROW(parse_recommender("popular"), ConfigError);
}
