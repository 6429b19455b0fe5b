#include "newsflow/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace newsflow {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(std::string(field) + ": " + why);
}

}  // namespace

std::string_view to_string(RecommenderKind kind) {
  switch (kind) {
    case RecommenderKind::ContentBase: return "ContentBase";
    case RecommenderKind::Collaborative: return "Collaborative";
    case RecommenderKind::NonRecommendation: return "NonRecommendation";
    case RecommenderKind::All: return "All";
  }
  return "?";
}

RecommenderKind parse_recommender(std::string_view text) {
  const std::string t = lower(text);
  if (t == "contentbase" || t == "content" || t == "content-base") return RecommenderKind::ContentBase;
  if (t == "collaborative" || t == "cf") return RecommenderKind::Collaborative;
  if (t == "nonrecommendation" || t == "nonrec" || t == "non-recommendation") {
    return RecommenderKind::NonRecommendation;
  }
  if (t == "all") return RecommenderKind::All;
  throw ConfigError("recommender: unknown strategy '" + std::string(text) +
                    "' (expected content, collaborative, nonrec or all)");
}

std::string_view to_string(InitDistribution d) {
  return d == InitDistribution::Simplex ? "simplex" : "unit-cube";
}

InitDistribution parse_init_distribution(std::string_view text) {
  const std::string t = lower(text);
  if (t == "simplex") return InitDistribution::Simplex;
  if (t == "unit-cube" || t == "cube" || t == "uniform") return InitDistribution::UnitCube;
  throw ConfigError("init_distribution: unknown value '" + std::string(text) + "' (expected simplex or unit-cube)");
}

void SimConfig::validate() const {
  require(turns >= 1, "turns", "must be >= 1");
  require(runs >= 1, "runs", "must be >= 1");
  require(n_users >= 1, "n_users", "must be >= 1");
  require(n_categories >= 2, "n_categories", "must be >= 2");
  require(n_categories <= 65535, "n_categories", "must be <= 65535");
  require(pool_size >= 1, "pool_size", "must be >= 1");
  require(articles_per_day >= 0, "articles_per_day", "must be >= 0");
  require(top_per_day >= 0, "top_per_day", "must be >= 0");
  require(presented_per_day >= top_per_day, "presented_per_day", "must be >= top_per_day");
  require(presented_per_day <= pool_size, "presented_per_day", "must be <= pool_size");
  require(reads_per_day >= 0 && reads_per_day <= 65535, "reads_per_day", "must be in [0, 65535]");
  require(elite_reads >= 0, "elite_reads", "must be >= 0");
  require(elite_reads <= reads_per_day, "elite_reads", "must be <= reads_per_day");
  require(cf_neighbors >= 1, "cf_neighbors", "must be >= 1");
  require(nonrec_shortlist >= 1, "nonrec_shortlist", "must be >= 1");
  require(std::isfinite(threshold) && threshold >= 0.0, "threshold", "must be finite and >= 0");
  require(std::isfinite(w) && w >= 0.0, "w", "must be finite and >= 0");
  require(std::isfinite(r) && r >= 0.0 && r <= 1.0, "r", "must be in [0, 1]");
  require(max_failed_draws >= 1, "max_failed_draws", "must be >= 1");
  require(random_admixture >= 0.0 && random_admixture <= 1.0, "random_admixture", "must be in [0, 1]");
  require(watch_category >= 0 && watch_category < n_categories, "watch_category", "must index a category");
  for (auto [win, name] : {std::pair{first_window, "first_window"}, std::pair{last_window, "last_window"}}) {
    if (win.start == 0 && win.end == 0) continue;
    require(win.start >= 0 && win.start <= win.end, name, "start must be <= end");
    require(win.end <= turns, name, "end must be <= turns");
  }
}

namespace {

int default_window_length(int turns) { return std::max(1, std::min(10, turns / 2)); }

}  // namespace

PeriodWindow SimConfig::resolved_first_window() const {
  if (first_window.start != 0 || first_window.end != 0) return first_window;
  return {1, default_window_length(turns)};
}

PeriodWindow SimConfig::resolved_last_window() const {
  if (last_window.start != 0 || last_window.end != 0) return last_window;
  const int len = default_window_length(turns);
  return {turns - len + 1, turns};
}

std::vector<ArticleId> UserAgent::read_set() const {
  std::vector<ArticleId> out;
  out.reserve(history_.size());
  for (const auto& h : history_) out.push_back(h.article);
  std::sort(out.begin(), out.end());
  return out;
}

void UserAgent::record_read(int turn, ArticleId article) {
  if (has_read(article)) {
    throw ContractError("user " + std::to_string(id_) + " re-read article " + std::to_string(article));
  }
  if (article >= read_mask_.size()) read_mask_.resize(std::max<std::size_t>(article + 1, read_mask_.size() * 2));
  read_mask_[article] = true;
  history_.push_back({turn, article});
  reads_today_.push_back(article);
}

double TurnRecord::mean_entropy() const {
  if (entropy.empty()) return 0.0;
  double s = 0.0;
  for (double h : entropy) s += h;
  return s / static_cast<double>(entropy.size());
}

double TurnRecord::std_entropy() const {
  if (entropy.size() < 2) return 0.0;
  const double m = mean_entropy();
  double ss = 0.0;
  for (double h : entropy) ss += (h - m) * (h - m);
  return std::sqrt(ss / static_cast<double>(entropy.size() - 1));
}

double TurnRecord::mean_reads() const {
  if (reads.empty()) return 0.0;
  double s = 0.0;
  for (auto r : reads) s += r;
  return s / static_cast<double>(reads.size());
}

World::World(SimConfig cfg, std::uint64_t seed) : config(std::move(cfg)), rng(seed, 0) {}

std::vector<ArticleId> World::todays_articles() const {
  std::vector<ArticleId> out;
  if (day == 0 || articles.empty()) return out;
  for (ArticleId a = std::max(todays_first, pool.empty() ? todays_first : pool.front());
       a < static_cast<ArticleId>(articles.size()); ++a) {
    out.push_back(a);
  }
  return out;
}

}  // namespace newsflow
