#include "newsflow/graphcluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace newsflow {

BrowseLog::BrowseLog(std::vector<BrowseRecord> records) {
  std::sort(records.begin(), records.end(), [](const BrowseRecord& a, const BrowseRecord& b) {
    if (a.article != b.article) return a.article < b.article;
    if (a.user != b.user) return a.user < b.user;
    return a.day < b.day;
  });
  records.erase(std::unique(records.begin(), records.end(),
                            [](const BrowseRecord& a, const BrowseRecord& b) {
                              return a.article == b.article && a.user == b.user;
                            }),
                records.end());
  records_ = std::move(records);

  offsets_.push_back(0);
  for (const auto& r : records_) {
    if (article_ids_.empty() || article_ids_.back() != r.article) {
      if (!article_ids_.empty()) offsets_.push_back(reader_list_.size());
      article_ids_.push_back(r.article);
    }
    reader_list_.push_back(r.user);
  }
  if (!article_ids_.empty()) offsets_.push_back(reader_list_.size());
}

std::span<const UserId> BrowseLog::readers(std::size_t article_index) const {
  return std::span<const UserId>(reader_list_).subspan(offsets_.at(article_index),
                                                       offsets_.at(article_index + 1) - offsets_[article_index]);
}

std::vector<UserId> BrowseLog::user_ids() const {
  std::vector<UserId> out(reader_list_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BrowseLog filter_articles(const BrowseLog& log, std::size_t min_readers) {
  std::vector<BrowseRecord> kept;
  kept.reserve(log.size());
  std::size_t i = 0;
  for (const auto& r : log.records()) {
    while (log.article_ids()[i] != r.article) ++i;
    if (log.readers(i).size() >= min_readers) kept.push_back(r);
  }
  return BrowseLog(std::move(kept));
}

double ArticleGraph::total_weight() const noexcept {
  double m = 0.0;
  for (const auto& e : edges) m += e.weight;
  return m;
}

std::vector<double> ArticleGraph::strengths() const {
  std::vector<double> k(nodes.size(), 0.0);
  for (const auto& e : edges) {
    k[e.u] += e.weight;
    k[e.v] += e.weight;
  }
  return k;
}

std::vector<std::size_t> ArticleGraph::degrees() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  for (const auto& e : edges) {
    ++d[e.u];
    ++d[e.v];
  }
  return d;
}

ArticleGraph ArticleGraph::from_edges(std::size_t n, std::span<const Edge> edges) {
  ArticleGraph g;
  g.nodes.resize(n);
  std::iota(g.nodes.begin(), g.nodes.end(), ArticleId{0});
  for (Edge e : edges) {
    if (e.u == e.v) throw std::invalid_argument("ArticleGraph: self-loops are not allowed");
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.v >= n) throw std::invalid_argument("ArticleGraph: edge endpoint out of range");
    g.edges.push_back(e);
  }
  return g;
}

ArticleGraph build_article_graph(const BrowseLog& log, double threshold, SimilarityKind kind) {
  ArticleGraph g;
  g.nodes = log.article_ids();
  const std::size_t n = g.nodes.size();

  // user -> article indices (ascending, since records are article-major).
  std::map<UserId, std::vector<std::uint32_t>> by_user;
  for (std::size_t i = 0; i < n; ++i) {
    for (UserId u : log.readers(i)) by_user[u].push_back(static_cast<std::uint32_t>(i));
  }

  std::vector<std::uint32_t> shared(n, 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    for (UserId u : log.readers(i)) {
      const auto& arts = by_user[u];
      for (auto it = std::upper_bound(arts.begin(), arts.end(), static_cast<std::uint32_t>(i)); it != arts.end();
           ++it) {
        if (shared[*it]++ == 0) touched.push_back(*it);
      }
    }
    std::sort(touched.begin(), touched.end());
    const std::size_t size_i = log.readers(i).size();
    for (std::uint32_t j : touched) {
      const std::size_t size_j = log.readers(j).size();
      const double sim = kind == SimilarityKind::Simpson
                             ? simpson_from_counts(shared[j], size_i, size_j)
                             : static_cast<double>(shared[j]) / static_cast<double>(size_i + size_j - shared[j]);
      if (sim > 0.0 && sim >= threshold) g.edges.push_back({static_cast<std::uint32_t>(i), j, sim});
      shared[j] = 0;
    }
    touched.clear();
  }
  return g;
}

std::size_t Partition::community_count() const noexcept {
  if (community.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(community.begin(), community.end())) + 1;
}

double modularity(const ArticleGraph& graph, std::span<const std::uint32_t> community) {
  if (community.size() != graph.node_count()) {
    throw DimensionError("modularity: partition does not cover every node");
  }
  const double m = graph.total_weight();
  if (!(m > 0.0)) return 0.0;
  std::map<std::uint32_t, std::pair<double, double>> acc;  // label -> (internal, total)
  for (const auto& e : graph.edges) {
    auto& cu = acc[community[e.u]];
    auto& cv = acc[community[e.v]];
    cu.second += e.weight;
    cv.second += e.weight;
    if (community[e.u] == community[e.v]) cu.first += 2.0 * e.weight;
  }
  double q = 0.0;
  for (const auto& [label, s] : acc) {
    const double tot = s.second / (2.0 * m);
    q += s.first / (2.0 * m) - tot * tot;
  }
  return q;
}

std::vector<std::uint32_t> canonical_labels(std::span<const std::uint32_t> labels) {
  std::map<std::uint32_t, std::uint32_t> remap;
  std::vector<std::uint32_t> out;
  out.reserve(labels.size());
  for (auto l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<std::uint32_t>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

namespace {

// Working graph for one Louvain level. self_weight is the weight of edges
// folded inside a super-node, counted over ordered pairs.
struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self_weight;
  std::vector<double> strength;
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }
};

LevelGraph level_from(const ArticleGraph& g) {
  LevelGraph lg;
  const std::size_t n = g.node_count();
  lg.adj.resize(n);
  lg.self_weight.assign(n, 0.0);
  lg.strength.assign(n, 0.0);
  for (const auto& e : g.edges) {
    lg.adj[e.u].push_back({e.v, e.weight});
    lg.adj[e.v].push_back({e.u, e.weight});
    lg.strength[e.u] += e.weight;
    lg.strength[e.v] += e.weight;
  }
  lg.two_m = 2.0 * g.total_weight();
  return lg;
}

double level_modularity(const LevelGraph& g, const std::vector<std::uint32_t>& comm) {
  const std::size_t k = g.size();
  std::vector<double> in(k, 0.0), tot(k, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    tot[comm[i]] += g.strength[i];
    in[comm[i]] += g.self_weight[i];
    for (auto [j, w] : g.adj[i]) {
      if (comm[j] == comm[i]) in[comm[i]] += w;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double t = tot[c] / g.two_m;
    q += in[c] / g.two_m - t * t;
  }
  return q;
}

// One local-moving phase. Returns true when at least one node moved.
bool local_moving(const LevelGraph& g, std::vector<std::uint32_t>& comm, RngStream& rng,
                  std::vector<std::uint32_t>* order_out) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.strength[i];

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);
  if (order_out) *order_out = order;

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::uint32_t i : order) {
      const std::uint32_t own = comm[i];
      const double ki = g.strength[i];
      touched.clear();
      for (auto [j, w] : g.adj[i]) {
        const std::uint32_t c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[own] -= ki;
      // Gain of inserting i into c, up to a positive constant factor.
      auto gain = [&](std::uint32_t c) { return link[c] - tot[c] * ki / g.two_m; };
      std::uint32_t best = own;
      double best_gain = gain(own);
      std::sort(touched.begin(), touched.end());
      for (std::uint32_t c : touched) {
        const double gc = gain(c);
        if (gc > best_gain + 1e-12) {
          best = c;
          best_gain = gc;
        }
      }
      tot[best] += ki;
      comm[i] = best;
      for (std::uint32_t c : touched) link[c] = 0.0;
      link[own] = 0.0;
      if (best != own) moved = any_move = true;
    }
  }
  return any_move;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& comm, std::size_t k) {
  LevelGraph out;
  out.adj.resize(k);
  out.self_weight.assign(k, 0.0);
  out.strength.assign(k, 0.0);
  out.two_m = g.two_m;
  std::vector<std::map<std::uint32_t, double>> acc(k);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::uint32_t ci = comm[i];
    out.strength[ci] += g.strength[i];
    out.self_weight[ci] += g.self_weight[i];
    for (auto [j, w] : g.adj[i]) {
      const std::uint32_t cj = comm[j];
      if (cj == ci) {
        out.self_weight[ci] += w;
      } else {
        acc[ci][cj] += w;
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (auto [d, w] : acc[c]) out.adj[c].push_back({d, w});
  }
  return out;
}

}  // namespace

Partition louvain(const ArticleGraph& graph, RngStream& rng, LouvainStats* stats) {
  const std::size_t n = graph.node_count();
  Partition result;
  result.community.resize(n);
  std::iota(result.community.begin(), result.community.end(), 0u);
  if (stats) *stats = {};
  if (n == 0 || graph.edges.empty()) {
    result.modularity = 0.0;
    return result;
  }

  LevelGraph level = level_from(graph);
  std::vector<std::uint32_t> flat = result.community;
  double best_q = modularity(graph, flat);

  for (int depth = 0;; ++depth) {
    std::vector<std::uint32_t> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0u);
    const bool moved = local_moving(level, comm, rng, (stats && depth == 0) ? &stats->visit_order : nullptr);
    if (!moved) break;
    comm = canonical_labels(comm);
    const std::size_t k = static_cast<std::size_t>(*std::max_element(comm.begin(), comm.end())) + 1;

    std::vector<std::uint32_t> next_flat(n);
    for (std::size_t v = 0; v < n; ++v) next_flat[v] = comm[flat[v]];
    const double q = level_modularity(level, comm);
    if (stats) stats->levels = depth + 1;
    if (q - best_q <= 1e-9) break;
    best_q = q;
    flat = std::move(next_flat);
    if (k == level.size()) break;
    level = aggregate(level, comm, k);
  }

  result.community = canonical_labels(flat);
  result.modularity = modularity(graph, result.community);
  return result;
}

double normalized_mutual_information(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) throw DimensionError("NMI: labelings differ in length");
  if (a.empty()) return 1.0;
  const double n = static_cast<double>(a.size());
  std::map<std::uint32_t, double> pa, pb;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
    pab[{a[i], b[i]}] += 1.0;
  }
  auto h = [n](const auto& counts) {
    double s = 0.0;
    for (const auto& [key, c] : counts) s -= (c / n) * std::log(c / n);
    return s;
  };
  const double ha = h(pa), hb = h(pb);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  double mi = 0.0;
  for (const auto& [key, c] : pab) {
    mi += (c / n) * std::log((c * n) / (pa[key.first] * pb[key.second]));
  }
  return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

PlantedLog planted_partition_log(const PlantedLogSpec& spec, RngStream& rng) {
  if (spec.blocks < 1 || spec.articles < spec.blocks || spec.users < spec.blocks) {
    throw ConfigError("planted log: need at least one article and one user per block");
  }
  PlantedLog out;
  const auto blocks = static_cast<std::uint32_t>(spec.blocks);
  out.article_block.resize(static_cast<std::size_t>(spec.articles));
  out.user_block.resize(static_cast<std::size_t>(spec.users));
  std::vector<std::vector<ArticleId>> members(blocks);
  for (std::size_t a = 0; a < out.article_block.size(); ++a) {
    out.article_block[a] = static_cast<std::uint32_t>(a * blocks / out.article_block.size());
    members[out.article_block[a]].push_back(static_cast<ArticleId>(a));
  }
  for (std::size_t u = 0; u < out.user_block.size(); ++u) {
    out.user_block[u] = static_cast<std::uint32_t>(u * blocks / out.user_block.size());
  }

  const auto days = static_cast<std::uint64_t>(std::max(1, spec.days));
  std::vector<BrowseRecord> records;
  for (std::size_t u = 0; u < out.user_block.size(); ++u) {
    const auto b = out.user_block[u];
    std::vector<ArticleId> own;
    for (ArticleId a : members[b]) {
      if (rng.uniform() < spec.read_probability) own.push_back(a);
    }
    // Noise reads make up `noise` of the user's total reads.
    const double expected_noise = spec.noise >= 1.0 ? 0.0 : spec.noise / (1.0 - spec.noise) * double(own.size());
    auto noisy = static_cast<std::size_t>(expected_noise);
    if (rng.uniform() < expected_noise - static_cast<double>(noisy)) ++noisy;
    const std::size_t outside = out.article_block.size() - members[b].size();
    for (std::size_t i = 0; i < noisy && outside > 0; ++i) {
      ArticleId a;
      do {
        a = static_cast<ArticleId>(rng.below(out.article_block.size()));
      } while (out.article_block[a] == b);
      own.push_back(a);
    }
    for (ArticleId a : own) {
      records.push_back({static_cast<UserId>(u), a, 1 + static_cast<int>(rng.below(days))});
    }
  }
  out.log = BrowseLog(std::move(records));
  return out;
}

}  // namespace newsflow
