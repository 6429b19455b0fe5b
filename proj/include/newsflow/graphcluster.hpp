#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "newsflow/core.hpp"
#include "newsflow/rng.hpp"

namespace newsflow {

struct BrowseRecord {
  UserId user = 0;
  ArticleId article = 0;
  int day = 0;
  friend bool operator==(const BrowseRecord&, const BrowseRecord&) = default;
};

/// A browsing log with (user, article) pairs collapsed to their earliest day.
/// Records are kept sorted by (article, user).
class BrowseLog {
 public:
  BrowseLog() = default;
  explicit BrowseLog(std::vector<BrowseRecord> records);

  const std::vector<BrowseRecord>& records() const noexcept { return records_; }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t size() const noexcept { return records_.size(); }

  // Distinct article ids, ascending; readers(i) is the sorted reader set of
  // article_ids()[i].
  const std::vector<ArticleId>& article_ids() const noexcept { return article_ids_; }
  std::span<const UserId> readers(std::size_t article_index) const;
  std::vector<UserId> user_ids() const;

 private:
  std::vector<BrowseRecord> records_;
  std::vector<ArticleId> article_ids_;
  std::vector<std::size_t> offsets_;
  std::vector<UserId> reader_list_;
};

BrowseLog filter_articles(const BrowseLog& log, std::size_t min_readers = 100);

enum class SimilarityKind { Simpson, Jaccard };

struct Edge {
  std::uint32_t u = 0;  // node indices, u < v
  std::uint32_t v = 0;
  double weight = 0.0;
};

struct ArticleGraph {
  std::vector<ArticleId> nodes;
  std::vector<Edge> edges;

  std::size_t node_count() const noexcept { return nodes.size(); }
  double total_weight() const noexcept;
  std::vector<double> strengths() const;
  std::vector<std::size_t> degrees() const;

  // Test helper: build from an explicit edge list on nodes 0..n-1.
  static ArticleGraph from_edges(std::size_t n, std::span<const Edge> edges);
};

/// Links every pair of articles whose reader-set similarity is >= threshold.
/// Candidate pairs come from shared readers, so disjoint articles cost nothing.
ArticleGraph build_article_graph(const BrowseLog& log, double threshold = 0.62,
                                 SimilarityKind kind = SimilarityKind::Simpson);

struct Partition {
  std::vector<std::uint32_t> community;  // per node index, labels 0..k-1
  double modularity = 0.0;

  std::size_t community_count() const noexcept;
};

/// Weighted Newman modularity at resolution 1. Zero total weight gives 0.
double modularity(const ArticleGraph& graph, std::span<const std::uint32_t> community);

struct LouvainStats {
  int levels = 0;
  std::vector<std::uint32_t> visit_order;  // first-level node visit order
};

/// Two-phase Louvain: local moving in seeded random order, then aggregation,
/// repeated until modularity improves by no more than 1e-9.
Partition louvain(const ArticleGraph& graph, RngStream& rng, LouvainStats* stats = nullptr);

// Labels renumbered 0..k-1 by first appearance.
std::vector<std::uint32_t> canonical_labels(std::span<const std::uint32_t> labels);

/// NMI with arithmetic-mean normalization 2 I(X;Y) / (H(X) + H(Y)).
/// Two single-cluster labelings give 1.
double normalized_mutual_information(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct PlantedLogSpec {
  int blocks = 5;
  int articles = 200;
  int users = 500;
  // Chance a user reads any given article of its own block.
  double read_probability = 0.8;
  // Fraction of a user's reads redirected to random articles outside its block.
  double noise = 0.05;
  int days = 45;
};

struct PlantedLog {
  BrowseLog log;
  std::vector<std::uint32_t> article_block;  // indexed by article id
  std::vector<std::uint32_t> user_block;     // indexed by user id
};

PlantedLog planted_partition_log(const PlantedLogSpec& spec, RngStream& rng);

}  // namespace newsflow
