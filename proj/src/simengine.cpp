#include "newsflow/simengine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace newsflow {

CategoryVector random_category_vector(std::size_t n, InitDistribution dist, RngStream& rng) {
  std::vector<double> v(n);
  if (dist == InitDistribution::Simplex) {
    // Gaps between sorted uniforms on [0,1] are uniform on the simplex.
    std::vector<double> cuts(n - 1);
    for (double& c : cuts) c = rng.uniform();
    std::sort(cuts.begin(), cuts.end());
    double prev = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      v[i] = cuts[i] - prev;
      prev = cuts[i];
    }
    v[n - 1] = 1.0 - prev;
  } else {
    double s = 0.0;
    while (!(s > 0.0)) {
      s = 0.0;
      for (double& x : v) s += (x = rng.uniform());
    }
  }
  return normalize(CategoryVector(std::move(v)));
}

RouletteWheel::RouletteWheel(std::vector<double> weights) : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("RouletteWheel: weights must be >= 0");
  }
  rebuild();
}

void RouletteWheel::rebuild() {
  prefix_.resize(weights_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) prefix_[i] = (s += weights_[i]);
}

std::optional<std::size_t> RouletteWheel::draw(RngStream& rng) const {
  const double total = this->total();
  if (!(total > 0.0)) return std::nullopt;
  const double target = rng.uniform() * total;
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), target);
  if (it == prefix_.end()) --it;
  auto i = static_cast<std::size_t>(it - prefix_.begin());
  // Rounding can land on a trailing zero-weight slot; walk back to a live one.
  while (weights_[i] == 0.0 && i > 0) --i;
  return i;
}

void RouletteWheel::remove(std::size_t i) {
  weights_.at(i) = 0.0;
  rebuild();
}

World init_world(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  World world(config, seed);
  const auto n = static_cast<std::size_t>(config.n_categories);

  world.users.reserve(static_cast<std::size_t>(config.n_users));
  world.user_rngs.reserve(static_cast<std::size_t>(config.n_users));
  for (int u = 0; u < config.n_users; ++u) {
    world.users.emplace_back(static_cast<UserId>(u), random_category_vector(n, config.init_distribution, world.rng));
    world.user_rngs.emplace_back(seed, static_cast<std::uint64_t>(u) + 1);
  }
  world.articles.reserve(static_cast<std::size_t>(config.pool_size) +
                         static_cast<std::size_t>(config.turns) * static_cast<std::size_t>(config.articles_per_day));
  for (int i = 0; i < config.pool_size; ++i) {
    const auto id = static_cast<ArticleId>(world.articles.size());
    world.articles.push_back({id, 0, random_category_vector(n, config.init_distribution, world.rng), {}});
    world.pool.push_back(id);
  }
  world.todays_first = static_cast<ArticleId>(world.articles.size());
  return world;
}

void spawn_articles(World& world) {
  const auto n = static_cast<std::size_t>(world.config.n_categories);
  world.todays_first = static_cast<ArticleId>(world.articles.size());
  for (int i = 0; i < world.config.articles_per_day; ++i) {
    const auto id = static_cast<ArticleId>(world.articles.size());
    world.articles.push_back(
        {id, world.day, random_category_vector(n, world.config.init_distribution, world.rng), {}});
    world.pool.push_back(id);
  }
  const auto cap = static_cast<std::size_t>(world.config.pool_size);
  if (world.pool.size() > cap) {
    world.pool.erase(world.pool.begin(), world.pool.end() - static_cast<std::ptrdiff_t>(cap));
  }
}

std::vector<ArticleId> present_top(World& world) {
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(world.config.top_per_day), world.pool.size());
  std::vector<ArticleId> top;
  top.reserve(k);
  for (std::size_t i : world.rng.sample_indices(world.pool.size(), k)) top.push_back(world.pool[i]);
  return top;
}

std::vector<ArticleId> assemble_slate(const World& world, const UserAgent& user, const Recommender& recommender,
                                      std::span<const ArticleId> top, RngStream& rng) {
  if (recommender.replaces_slate()) {
    return recommender.recommend(world, user, world.pool.size(), rng);
  }
  const auto& cfg = world.config;
  const auto individual = static_cast<std::size_t>(cfg.individual_per_day());
  const auto random_slots =
      static_cast<std::size_t>(std::llround(cfg.random_admixture * static_cast<double>(individual)));
  const std::size_t from_recommender = individual - std::min(random_slots, individual);

  std::vector<ArticleId> slate(top.begin(), top.end());
  if (from_recommender > 0) {
    for (ArticleId a : recommender.recommend(world, user, from_recommender, rng)) {
      if (std::find(slate.begin(), slate.end(), a) == slate.end()) slate.push_back(a);
    }
  }
  const std::size_t target = std::min(static_cast<std::size_t>(cfg.presented_per_day), world.pool.size());
  backfill_unread(slate, target, user, world.pool, rng);
  return slate;
}

std::vector<ArticleId> select_articles(const UserAgent& user, std::span<const ArticleId> slate,
                                       const std::vector<Article>& articles, const SimConfig& config,
                                       RngStream& rng) {
  const auto& interest = user.interest();
  const std::size_t n = interest.size();

  std::vector<ScoredArticle> candidates;
  candidates.reserve(slate.size());
  for (ArticleId a : slate) {
    if (user.has_read(a)) continue;
    const Article& art = articles[a];
    candidates.push_back({dot(interest.data(), art.topic.data(), n), art.published_day, a});
  }

  const auto max_reads = static_cast<std::size_t>(config.reads_per_day);
  std::vector<ArticleId> chosen;
  chosen.reserve(max_reads);

  // Elite phase: best-evaluated candidates that clear the threshold.
  std::vector<ScoredArticle> ranked = candidates;
  const std::size_t elite_k = std::min({static_cast<std::size_t>(config.elite_reads), max_reads, ranked.size()});
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(elite_k), ranked.end(),
                    ranks_before);
  for (std::size_t i = 0; i < elite_k; ++i) {
    if (ranked[i].score < config.threshold) break;
    chosen.push_back(ranked[i].id);
  }

  // Roulette phase over the remaining candidates, in slate order.
  std::vector<ScoredArticle> rest;
  std::vector<double> weights;
  rest.reserve(candidates.size());
  weights.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (std::find(chosen.begin(), chosen.end(), c.id) != chosen.end()) continue;
    rest.push_back(c);
    weights.push_back(c.score);
  }
  RouletteWheel wheel(std::move(weights));
  int failures = 0;
  while (chosen.size() < max_reads) {
    auto pick = wheel.draw(rng);
    if (!pick) break;
    if (rest[*pick].score < config.threshold) {
      if (++failures >= config.max_failed_draws) break;
      continue;
    }
    failures = 0;
    chosen.push_back(rest[*pick].id);
    wheel.remove(*pick);
  }
  return chosen;
}

CategoryVector update_interest(const CategoryVector& old, std::span<const CategoryVector* const> read_topics,
                               double w, double r) {
  if (read_topics.empty()) return old;
  const std::size_t n = old.size();
  const double mean = old.sum() / static_cast<double>(n);
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const CategoryVector* t : read_topics) {
      if (t->size() != n) throw DimensionError("update_interest: topic length mismatch");
      s += (*t)[i];
    }
    const double k = old[i] >= mean ? 1.0 + r : 1.0 - r;
    raw[i] = w * old[i] + k * s;
  }
  CategoryVector v(std::move(raw));
  if (!(v.sum() > 0.0)) return old;
  return normalize(v);
}

TurnRecord make_turn_record(const World& world) {
  TurnRecord rec;
  rec.day = world.day;
  const std::size_t n = world.users.size();
  rec.entropy.reserve(n);
  rec.argmax.reserve(n);
  rec.watch_share.reserve(n);
  rec.max_share.reserve(n);
  rec.reads.reserve(n);
  const auto watch = static_cast<std::size_t>(world.config.watch_category);
  for (const auto& u : world.users) {
    const auto& v = u.interest();
    const std::size_t top = argmax_category(v);
    rec.entropy.push_back(entropy(v));
    rec.argmax.push_back(static_cast<std::uint16_t>(top));
    rec.watch_share.push_back(v[watch]);
    rec.max_share.push_back(v[top]);
    rec.reads.push_back(static_cast<std::uint16_t>(world.day == 0 ? 0 : u.reads_today().size()));
  }
  return rec;
}

TurnRecord step(World& world, Recommender& recommender, int workers) {
  world.day += 1;
  spawn_articles(world);
  const std::vector<ArticleId> top = present_top(world);
  recommender.prepare(world);

  const std::size_t n_users = world.users.size();
  std::vector<std::vector<ArticleId>> reads(n_users);
  parallel_for(n_users, workers, [&](std::size_t u) {
    const UserAgent& user = world.users[u];
    RngStream& rng = world.user_rngs[u];
    const auto slate = assemble_slate(world, user, recommender, top, rng);
    reads[u] = select_articles(user, slate, world.articles, world.config, rng);
  });

  std::vector<const CategoryVector*> topics;
  for (std::size_t u = 0; u < n_users; ++u) {
    UserAgent& user = world.users[u];
    user.begin_turn();
    topics.clear();
    for (ArticleId a : reads[u]) {
      user.record_read(world.day, a);
      world.articles[a].readers.push_back(static_cast<UserId>(u));
      topics.push_back(&world.articles[a].topic);
    }
    user.set_interest(update_interest(user.interest(), topics, world.config.w, world.config.r));
  }

  world.records.push_back(make_turn_record(world));
  return world.records.back();
}

std::uint64_t run_seed(std::uint64_t base_seed, int run_index) noexcept {
  return mix64(base_seed ^ mix64(static_cast<std::uint64_t>(run_index) + 1));
}

RunResult run_with_seed(const SimConfig& config, std::uint64_t seed, int workers) {
  World world = init_world(config, seed);
  auto recommender = make_recommender(config.recommender);
  world.records.push_back(make_turn_record(world));
  for (int t = 0; t < config.turns; ++t) step(world, *recommender, workers);

  RunResult result;
  result.seed = seed;
  result.recommender = config.recommender;
  for (const auto& u : world.users) result.total_reads += u.read_count();
  result.articles_created = world.articles.size();
  result.records = std::move(world.records);
  return result;
}

RunResult run(const SimConfig& config, int workers) { return run_with_seed(config, run_seed(config.seed, 0), workers); }

BatchResult run_batch(const SimConfig& config, int workers) {
  config.validate();
  BatchResult batch;
  batch.config = config;
  batch.runs.resize(static_cast<std::size_t>(config.runs));
  const int run_workers = std::max(1, std::min(workers, config.runs));
  const int inner_workers = std::max(1, workers / run_workers);
  parallel_for(batch.runs.size(), run_workers, [&](std::size_t i) {
    batch.runs[i] = run_with_seed(config, run_seed(config.seed, static_cast<int>(i)), inner_workers);
  });

  const std::size_t turns = static_cast<std::size_t>(config.turns) + 1;
  batch.entropy_mean.assign(turns, 0.0);
  batch.entropy_std.assign(turns, 0.0);
  const double runs = static_cast<double>(batch.runs.size());
  for (std::size_t t = 0; t < turns; ++t) {
    double s = 0.0;
    for (const auto& r : batch.runs) s += r.records[t].mean_entropy();
    const double m = s / runs;
    double ss = 0.0;
    for (const auto& r : batch.runs) ss += (r.records[t].mean_entropy() - m) * (r.records[t].mean_entropy() - m);
    batch.entropy_mean[t] = m;
    batch.entropy_std[t] = batch.runs.size() > 1 ? std::sqrt(ss / (runs - 1.0)) : 0.0;
  }
  return batch;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace newsflow
