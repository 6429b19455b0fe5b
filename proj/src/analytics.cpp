#include "newsflow/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "newsflow/stats.hpp"

namespace newsflow {

CommunityMap community_map(const ArticleGraph& graph, const Partition& partition) {
  if (partition.community.size() != graph.node_count()) {
    throw DimensionError("community_map: partition does not match graph");
  }
  CommunityMap out;
  for (std::size_t i = 0; i < graph.node_count(); ++i) out[graph.nodes[i]] = partition.community[i];
  return out;
}

namespace {

// Community read counts of one user inside a window.
std::map<std::uint32_t, double> window_counts(const BrowseLog& log, const CommunityMap& communities,
                                              PeriodWindow window, UserId user) {
  std::map<std::uint32_t, double> counts;
  for (const auto& r : log.records()) {
    if (r.user != user || !window.contains(r.day)) continue;
    auto it = communities.find(r.article);
    if (it != communities.end()) counts[it->second] += 1.0;
  }
  return counts;
}

double entropy_of(const std::map<std::uint32_t, double>& counts) {
  std::vector<double> c;
  c.reserve(counts.size());
  for (const auto& [k, v] : counts) c.push_back(v);
  return entropy_of_counts(c);
}

std::uint32_t most_read(const std::map<std::uint32_t, double>& counts) {
  std::uint32_t best = counts.begin()->first;
  double best_count = counts.begin()->second;
  for (const auto& [k, v] : counts) {
    if (v > best_count) {
      best = k;
      best_count = v;
    }
  }
  return best;
}

}  // namespace

std::optional<double> cluster_entropy(const BrowseLog& log, const CommunityMap& communities, PeriodWindow window,
                                      UserId user) {
  const auto counts = window_counts(log, communities, window, user);
  if (counts.empty()) return std::nullopt;
  return entropy_of(counts);
}

ClusterDiversity cluster_diversity(const BrowseLog& log, const CommunityMap& communities, PeriodWindow first,
                                   PeriodWindow last, ReadBounds bounds) {
  struct Acc {
    std::size_t reads = 0;
    std::map<std::uint32_t, double> c1, c2;
  };
  std::map<UserId, Acc> per_user;
  ClusterDiversity out;
  for (const auto& r : log.records()) {
    const bool in1 = first.contains(r.day);
    const bool in2 = last.contains(r.day);
    if (!in1 && !in2) continue;
    Acc& acc = per_user[r.user];
    ++acc.reads;
    auto it = communities.find(r.article);
    if (it == communities.end()) {
      ++out.uncovered_records;
      continue;
    }
    if (in1) acc.c1[it->second] += 1.0;
    if (in2) acc.c2[it->second] += 1.0;
  }
  for (const auto& [user, acc] : per_user) {
    if (acc.reads < bounds.min_reads || acc.reads > bounds.max_reads) continue;
    if (acc.c1.empty() || acc.c2.empty()) continue;
    UserDiversityRecord rec;
    rec.user = user;
    rec.h1 = entropy_of(acc.c1);
    rec.h2 = entropy_of(acc.c2);
    rec.delta = rec.h2 - rec.h1;
    rec.argmax1 = most_read(acc.c1);
    rec.argmax2 = most_read(acc.c2);
    out.users.push_back(rec);
  }
  return out;
}

namespace {

void check_window(const RunResult& run, PeriodWindow w) {
  if (w.start < 0 || w.end < w.start || static_cast<std::size_t>(w.end) >= run.records.size()) {
    throw ConfigError("window [" + std::to_string(w.start) + "," + std::to_string(w.end) +
                      "] is outside the recorded turns");
  }
}

}  // namespace

EntropySeries interest_entropy_series(const RunResult& run, PeriodWindow first, PeriodWindow last) {
  check_window(run, first);
  check_window(run, last);
  EntropySeries s;
  for (const auto& rec : run.records) {
    s.mean.push_back(rec.mean_entropy());
    s.stddev.push_back(rec.std_entropy());
  }
  auto aggregate = [&](PeriodWindow w) {
    WindowAggregate a;
    for (int t = w.start; t <= w.end; ++t) a.window_mean += s.mean[static_cast<std::size_t>(t)];
    a.window_mean /= static_cast<double>(w.length());
    a.final_turn = s.mean[static_cast<std::size_t>(w.end)];
    return a;
  };
  s.first = aggregate(first);
  s.last = aggregate(last);
  return s;
}

double max_category_change_rate(const RunResult& run, PeriodWindow first, PeriodWindow last) {
  check_window(run, first);
  check_window(run, last);
  const auto& a = run.records[static_cast<std::size_t>(first.end)].argmax;
  const auto& b = run.records[static_cast<std::size_t>(last.end)].argmax;
  if (a.empty()) return 0.0;
  std::size_t changed = 0;
  for (std::size_t u = 0; u < a.size(); ++u) changed += a[u] != b[u];
  return 100.0 * static_cast<double>(changed) / static_cast<double>(a.size());
}

std::vector<UserDiversityRecord> interest_diversity(const RunResult& run, PeriodWindow first, PeriodWindow last) {
  check_window(run, first);
  check_window(run, last);
  const std::size_t users = run.records.front().user_count();
  std::vector<UserDiversityRecord> out(users);
  auto window_mean = [&](PeriodWindow w, std::size_t u) {
    double s = 0.0;
    for (int t = w.start; t <= w.end; ++t) s += run.records[static_cast<std::size_t>(t)].entropy[u];
    return s / static_cast<double>(w.length());
  };
  for (std::size_t u = 0; u < users; ++u) {
    auto& r = out[u];
    r.user = static_cast<UserId>(u);
    r.h1 = window_mean(first, u);
    r.h2 = window_mean(last, u);
    r.delta = r.h2 - r.h1;
    r.argmax1 = run.records[static_cast<std::size_t>(first.end)].argmax[u];
    r.argmax2 = run.records[static_cast<std::size_t>(last.end)].argmax[u];
  }
  return out;
}

double fraction_max_share_above(const TurnRecord& record, double cut) {
  if (record.max_share.empty()) return 0.0;
  std::size_t n = 0;
  for (double s : record.max_share) n += s > cut;
  return static_cast<double>(n) / static_cast<double>(record.max_share.size());
}

namespace {

CohortSummary summarize(std::span<const UserDiversityRecord> all, const std::vector<UserId>& ids) {
  CohortSummary s;
  s.size = ids.size();
  if (ids.empty()) return s;
  for (const auto& r : all) {
    if (!std::binary_search(ids.begin(), ids.end(), r.user)) continue;
    s.mean_h1 += r.h1;
    s.mean_h2 += r.h2;
    s.mean_delta += r.delta;
  }
  const double n = static_cast<double>(ids.size());
  s.mean_h1 /= n;
  s.mean_h2 /= n;
  s.mean_delta /= n;
  return s;
}

}  // namespace

CohortReport cohort_split(std::span<const UserDiversityRecord> records) {
  if (records.size() < 2) throw DataError("cohort_split: need at least two diversity records");
  CohortReport rep;
  rep.total_users = records.size();
  std::vector<UserDiversityRecord> negative;
  for (const auto& r : records) {
    if (r.delta > 0.0) rep.increasing.push_back(r.user);
    if (r.delta < 0.0) negative.push_back(r);
  }
  rep.decreasing_available = negative.size();
  std::sort(negative.begin(), negative.end(), [](const auto& a, const auto& b) {
    return a.delta != b.delta ? a.delta < b.delta : a.user < b.user;
  });
  const std::size_t take = std::min(rep.increasing.size(), negative.size());
  for (std::size_t i = 0; i < take; ++i) rep.decreasing.push_back(negative[i].user);
  // Equal sizes: trim the increasing side too when decreasing users run out.
  std::vector<UserDiversityRecord> positive;
  if (take < rep.increasing.size()) {
    for (const auto& r : records) {
      if (r.delta > 0.0) positive.push_back(r);
    }
    std::sort(positive.begin(), positive.end(), [](const auto& a, const auto& b) {
      return a.delta != b.delta ? a.delta > b.delta : a.user < b.user;
    });
    rep.increasing.clear();
    for (std::size_t i = 0; i < take; ++i) rep.increasing.push_back(positive[i].user);
  }
  std::sort(rep.increasing.begin(), rep.increasing.end());
  std::sort(rep.decreasing.begin(), rep.decreasing.end());
  rep.increasing_summary = summarize(records, rep.increasing);
  rep.decreasing_summary = summarize(records, rep.decreasing);
  return rep;
}

std::vector<CommunityAffinity> cluster_affinity_diff(const BrowseLog& log, const CommunityMap& communities,
                                                     const CohortReport& cohorts) {
  if (cohorts.increasing.empty() || cohorts.decreasing.empty()) {
    throw DataError("cluster_affinity_diff: both cohorts must be non-empty");
  }
  // community -> users of each cohort who read it
  std::map<std::uint32_t, std::pair<std::vector<UserId>, std::vector<UserId>>> readers;
  for (const auto& [article, c] : communities) readers[c];
  for (const auto& r : log.records()) {
    auto it = communities.find(r.article);
    if (it == communities.end()) continue;
    auto& slot = readers[it->second];
    if (std::binary_search(cohorts.increasing.begin(), cohorts.increasing.end(), r.user)) slot.first.push_back(r.user);
    if (std::binary_search(cohorts.decreasing.begin(), cohorts.decreasing.end(), r.user)) slot.second.push_back(r.user);
  }
  auto distinct = [](std::vector<UserId> v) {
    std::sort(v.begin(), v.end());
    return static_cast<double>(std::unique(v.begin(), v.end()) - v.begin());
  };
  std::vector<CommunityAffinity> out;
  for (auto& [c, lists] : readers) {
    CommunityAffinity a;
    a.community = c;
    a.increasing_fraction = distinct(lists.first) / static_cast<double>(cohorts.increasing.size());
    a.decreasing_fraction = distinct(lists.second) / static_cast<double>(cohorts.decreasing.size());
    a.difference = a.increasing_fraction - a.decreasing_fraction;
    out.push_back(a);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    const double da = std::abs(a.difference), db = std::abs(b.difference);
    return da != db ? da > db : a.community < b.community;
  });
  return out;
}

ScenarioSummary summarize_scenario(const BatchResult& batch) {
  ScenarioSummary s;
  s.scenario = batch.config.recommender;
  s.runs = static_cast<int>(batch.runs.size());
  s.first_window = batch.config.resolved_first_window();
  s.last_window = batch.config.resolved_last_window();
  std::vector<double> first_final, last_final, reads;
  for (const auto& run : batch.runs) {
    const auto series = interest_entropy_series(run, s.first_window, s.last_window);
    s.ace_initial_runs.push_back(series.mean.front());
    s.ace_first_runs.push_back(series.first.window_mean);
    s.ace_last_runs.push_back(series.last.window_mean);
    first_final.push_back(series.first.final_turn);
    last_final.push_back(series.last.final_turn);
    s.mcc_runs.push_back(max_category_change_rate(run, s.first_window, s.last_window));
    s.high_bias_runs.push_back(fraction_max_share_above(run.records.back()));
    double r = 0.0;
    for (std::size_t t = 1; t < run.records.size(); ++t) r += run.records[t].mean_reads();
    reads.push_back(run.records.size() > 1 ? r / static_cast<double>(run.records.size() - 1) : 0.0);
  }
  s.ace_initial = stats::mean(s.ace_initial_runs);
  s.ace_first = stats::mean(s.ace_first_runs);
  s.ace_last = stats::mean(s.ace_last_runs);
  s.ace_first_final = stats::mean(first_final);
  s.ace_last_final = stats::mean(last_final);
  s.mcc = stats::mean(s.mcc_runs);
  s.high_bias_fraction = stats::mean(s.high_bias_runs);
  s.mean_reads = stats::mean(reads);
  return s;
}

}  // namespace newsflow
