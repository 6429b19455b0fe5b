#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "newsflow/analytics.hpp"
#include "newsflow/graphcluster.hpp"
#include "newsflow/simengine.hpp"

namespace newsflow {

// Shortest round-trip decimal form; identical bits give identical text.
std::string format_double(double v);

/// RFC 4180 writer: CRLF line ends, fields quoted only when needed.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& field(std::string_view v);
  CsvWriter& field(double v);
  CsvWriter& field(std::uint64_t v);
  CsvWriter& field(std::int64_t v);
  CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
  CsvWriter& field(unsigned v) { return field(static_cast<std::uint64_t>(v)); }
  void end_row();

  std::size_t rows() const noexcept { return rows_; }

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
};

std::string csv_escape(std::string_view v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line;  // 1-based source line of each row

  // Index of a header column; throws DataError when absent.
  std::size_t column(std::string_view name) const;
};

// Throws DataError (with the line number) on malformed input.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

// Cell parsers; DataError names the line and column.
double csv_double(const std::string& s, std::size_t line, std::string_view column);
std::uint64_t csv_uint(const std::string& s, std::size_t line, std::string_view column);

/// Browsing log with header user_id,article_id,day.
BrowseLog read_browse_log(const std::filesystem::path& path);
void write_browse_log(std::ostream& out, const BrowseLog& log);

/// Community assignment with header article_id,community_id.
CommunityMap read_communities(const std::filesystem::path& path);

void write_edges_csv(std::ostream& out, const ArticleGraph& graph);
void write_communities_csv(std::ostream& out, const ArticleGraph& graph, const Partition& partition);

// One row per (run, turn): turns + 1 rows per run.
void write_metrics_csv(std::ostream& out, const BatchResult& batch);
// Per-user interest diversity of every run.
void write_user_diversity_csv(std::ostream& out, const BatchResult& batch);
// Per-user watch-category share by turn, first run only.
void write_trajectories_csv(std::ostream& out, const BatchResult& batch);
void write_diversity_csv(std::ostream& out, std::span<const UserDiversityRecord> records);
void write_affinity_csv(std::ostream& out, std::span<const CommunityAffinity> affinity);

nlohmann::json to_json(const ScenarioSummary& s);
nlohmann::json to_json(const CohortReport& r);

// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;
};

Histogram make_histogram(std::span<const double> values, double lo, double hi, std::size_t bins);

// Overlaid first/last histograms, static SVG 1.1.
std::string histogram_svg(std::string_view title, const Histogram& first, const Histogram& last,
                          std::string_view first_label, std::string_view last_label);

// One polyline per series; x = index, y in [0, 1].
std::string trajectory_svg(std::string_view title, const std::vector<std::vector<double>>& series);

std::string xml_escape(std::string_view v);

}  // namespace newsflow
