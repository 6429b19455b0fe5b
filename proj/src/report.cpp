#include "newsflow/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace newsflow {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string csv_escape(std::string_view v) {
  if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
  for (const auto& h : header) field(h);
  end_row();
  rows_ = 0;
}

void CsvWriter::separator() {
  if (in_row_ >= columns_) throw ContractError("CsvWriter: too many fields in row");
  if (in_row_ > 0) out_ << ',';
  ++in_row_;
}

CsvWriter& CsvWriter::field(std::string_view v) {
  separator();
  out_ << csv_escape(v);
  return *this;
}

CsvWriter& CsvWriter::field(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t v) {
  separator();
  std::array<char, 24> buf{};
  out_.write(buf.data(), std::to_chars(buf.data(), buf.data() + buf.size(), v).ptr - buf.data());
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
  separator();
  std::array<char, 24> buf{};
  out_.write(buf.data(), std::to_chars(buf.data(), buf.data() + buf.size(), v).ptr - buf.data());
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw ContractError("CsvWriter: row has the wrong number of fields");
  out_ << "\r\n";
  in_row_ = 0;
  ++rows_;
}

std::size_t CsvTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("csv: missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> lines;
  std::vector<std::string> row;
  std::string cell;
  std::size_t line = 1, row_line = 1;
  bool quoted = false, cell_started = false, row_started = false;
  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_row = [&] {
    end_cell();
    records.push_back(std::move(row));
    lines.push_back(row_line);
    row.clear();
    row_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!row_started) {
      row_started = true;
      row_line = line;
    }
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      if (cell_started) throw DataError("csv line " + std::to_string(line) + ": stray quote");
      quoted = true;
      cell_started = true;
    } else if (c == ',') {
      end_cell();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
      ++line;
    } else {
      cell += c;
      cell_started = true;
    }
  }
  if (quoted) throw DataError("csv line " + std::to_string(row_line) + ": unterminated quote");
  if (row_started) end_row();

  CsvTable t;
  if (records.empty()) throw DataError("csv: missing header");
  t.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() == 1 && records[i][0].empty()) continue;  // blank line
    if (records[i].size() != t.header.size()) {
      throw DataError("csv line " + std::to_string(lines[i]) + ": expected " + std::to_string(t.header.size()) +
                      " fields, got " + std::to_string(records[i].size()));
    }
    t.rows.push_back(std::move(records[i]));
    t.line.push_back(lines[i]);
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

namespace {

template <class T>
T parse_int(const std::string& s, std::size_t line, std::string_view column) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line) + ": bad " + std::string(column) + " '" + s + "'");
  }
  return v;
}

}  // namespace

double csv_double(const std::string& s, std::size_t line, std::string_view column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line) + ": bad " + std::string(column) + " '" + s + "'");
  }
  return v;
}

std::uint64_t csv_uint(const std::string& s, std::size_t line, std::string_view column) {
  return parse_int<std::uint64_t>(s, line, column);
}

BrowseLog read_browse_log(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t cu = t.column("user_id"), ca = t.column("article_id"), cd = t.column("day");
  std::vector<BrowseRecord> recs;
  recs.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    recs.push_back({parse_int<UserId>(r[cu], t.line[i], "user_id"), parse_int<ArticleId>(r[ca], t.line[i], "article_id"),
                    parse_int<int>(r[cd], t.line[i], "day")});
  }
  return BrowseLog(std::move(recs));
}

void write_browse_log(std::ostream& out, const BrowseLog& log) {
  CsvWriter w(out, {"user_id", "article_id", "day"});
  for (const auto& r : log.records()) {
    w.field(r.user).field(r.article).field(r.day);
    w.end_row();
  }
}

CommunityMap read_communities(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t ca = t.column("article_id"), cc = t.column("community_id");
  CommunityMap m;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto a = parse_int<ArticleId>(t.rows[i][ca], t.line[i], "article_id");
    const auto c = parse_int<std::uint32_t>(t.rows[i][cc], t.line[i], "community_id");
    if (!m.emplace(a, c).second) {
      throw DataError("line " + std::to_string(t.line[i]) + ": duplicate article_id " + std::to_string(a));
    }
  }
  return m;
}

void write_edges_csv(std::ostream& out, const ArticleGraph& graph) {
  CsvWriter w(out, {"src", "dst", "weight"});
  for (const auto& e : graph.edges) {
    w.field(graph.nodes[e.u]).field(graph.nodes[e.v]).field(e.weight);
    w.end_row();
  }
}

void write_communities_csv(std::ostream& out, const ArticleGraph& graph, const Partition& partition) {
  CsvWriter w(out, {"article_id", "community_id"});
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    w.field(graph.nodes[i]).field(partition.community[i]);
    w.end_row();
  }
}

void write_metrics_csv(std::ostream& out, const BatchResult& batch) {
  CsvWriter w(out, {"run", "turn", "mean_entropy", "std_entropy", "mean_reads", "mean_watch_share",
                    "max_share_above_half"});
  for (std::size_t r = 0; r < batch.runs.size(); ++r) {
    for (const auto& rec : batch.runs[r].records) {
      double watch = 0.0;
      for (double s : rec.watch_share) watch += s;
      if (!rec.watch_share.empty()) watch /= static_cast<double>(rec.watch_share.size());
      w.field(static_cast<std::uint64_t>(r)).field(rec.day).field(rec.mean_entropy()).field(rec.std_entropy());
      w.field(rec.mean_reads()).field(watch).field(fraction_max_share_above(rec));
      w.end_row();
    }
  }
}

void write_user_diversity_csv(std::ostream& out, const BatchResult& batch) {
  const PeriodWindow first = batch.config.resolved_first_window(), last = batch.config.resolved_last_window();
  CsvWriter w(out, {"run", "user_id", "h1", "h2", "delta", "argmax1", "argmax2"});
  for (std::size_t r = 0; r < batch.runs.size(); ++r) {
    for (const auto& u : interest_diversity(batch.runs[r], first, last)) {
      w.field(static_cast<std::uint64_t>(r)).field(u.user).field(u.h1).field(u.h2).field(u.delta);
      w.field(u.argmax1).field(u.argmax2);
      w.end_row();
    }
  }
}

void write_trajectories_csv(std::ostream& out, const BatchResult& batch) {
  CsvWriter w(out, {"turn", "user_id", "watch_share"});
  if (batch.runs.empty()) return;
  for (const auto& rec : batch.runs.front().records) {
    for (std::size_t u = 0; u < rec.watch_share.size(); ++u) {
      w.field(rec.day).field(static_cast<std::uint64_t>(u)).field(rec.watch_share[u]);
      w.end_row();
    }
  }
}

void write_diversity_csv(std::ostream& out, std::span<const UserDiversityRecord> records) {
  CsvWriter w(out, {"user_id", "h1", "h2", "delta", "argmax1", "argmax2"});
  for (const auto& u : records) {
    w.field(u.user).field(u.h1).field(u.h2).field(u.delta).field(u.argmax1).field(u.argmax2);
    w.end_row();
  }
}

void write_affinity_csv(std::ostream& out, std::span<const CommunityAffinity> affinity) {
  CsvWriter w(out, {"rank", "community_id", "increasing_fraction", "decreasing_fraction", "difference"});
  std::uint64_t rank = 1;
  for (const auto& a : affinity) {
    w.field(rank++).field(a.community).field(a.increasing_fraction).field(a.decreasing_fraction).field(a.difference);
    w.end_row();
  }
}

json to_json(const ScenarioSummary& s) {
  return json{{"scenario", std::string(to_string(s.scenario))},
              {"runs", s.runs},
              {"first_window", {s.first_window.start, s.first_window.end}},
              {"last_window", {s.last_window.start, s.last_window.end}},
              {"ace_initial", s.ace_initial},
              {"ace_first", s.ace_first},
              {"ace_last", s.ace_last},
              {"ace_first_final_turn", s.ace_first_final},
              {"ace_last_final_turn", s.ace_last_final},
              {"mcc", s.mcc},
              {"max_share_above_half", s.high_bias_fraction},
              {"mean_reads", s.mean_reads},
              {"per_run",
               {{"ace_initial", s.ace_initial_runs},
                {"ace_first", s.ace_first_runs},
                {"ace_last", s.ace_last_runs},
                {"mcc", s.mcc_runs},
                {"max_share_above_half", s.high_bias_runs}}}};
}

json to_json(const CohortReport& r) {
  auto summary = [](const CohortSummary& s) {
    return json{{"size", s.size}, {"mean_h1", s.mean_h1}, {"mean_h2", s.mean_h2}, {"mean_delta", s.mean_delta}};
  };
  return json{{"total_users", r.total_users},
              {"decreasing_available", r.decreasing_available},
              {"increasing", summary(r.increasing_summary)},
              {"decreasing", summary(r.decreasing_summary)},
              {"increasing_users", r.increasing},
              {"decreasing_users", r.decreasing}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

Histogram make_histogram(std::span<const double> values, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw ContractError("make_histogram: need bins > 0 and hi > lo");
  Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    auto b = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

std::string xml_escape(std::string_view v) {
  std::string out;
  for (char c : v) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

// Fixed-precision coordinates keep the SVG text stable.
std::string coord(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return std::string(buf.data(), res.ptr);
}

void svg_open(std::ostringstream& s, std::string_view title) {
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << coord(kWidth) << "\" height=\""
    << coord(kHeight) << "\" viewBox=\"0 0 " << coord(kWidth) << ' ' << coord(kHeight) << "\">\n"
    << "<title>" << xml_escape(title) << "</title>\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << coord(kWidth) << "\" height=\"" << coord(kHeight)
    << "\" fill=\"white\"/>\n"
    << "<text x=\"" << coord(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"15\">" << xml_escape(title) << "</text>\n";
}

void axes(std::ostringstream& s, std::string_view xlabel, std::string_view ylabel, double xmin, double xmax,
          double ymin, double ymax) {
  const double x0 = kLeft, y0 = kTop + kPlotH;
  s << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << coord(x0) << "\" y1=\"" << coord(y0) << "\" x2=\"" << coord(x0 + kPlotW) << "\" y2=\""
    << coord(y0) << "\"/>\n"
    << "<line x1=\"" << coord(x0) << "\" y1=\"" << coord(kTop) << "\" x2=\"" << coord(x0) << "\" y2=\""
    << coord(y0) << "\"/>\n</g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    s << "<text x=\"" << coord(x0 + f * kPlotW) << "\" y=\"" << coord(y0 + 16) << "\" text-anchor=\"middle\">"
      << format_double(std::round((xmin + f * (xmax - xmin)) * 100) / 100) << "</text>\n";
    s << "<text x=\"" << coord(x0 - 6) << "\" y=\"" << coord(y0 - f * kPlotH + 4) << "\" text-anchor=\"end\">"
      << format_double(std::round((ymin + f * (ymax - ymin)) * 100) / 100) << "</text>\n";
  }
  s << "<text x=\"" << coord(x0 + kPlotW / 2) << "\" y=\"" << coord(kHeight - 10)
    << "\" text-anchor=\"middle\">" << xml_escape(xlabel) << "</text>\n"
    << "<text x=\"14\" y=\"" << coord(kTop + kPlotH / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
    << coord(kTop + kPlotH / 2) << ")\">" << xml_escape(ylabel) << "</text>\n</g>\n";
}

}  // namespace

std::string histogram_svg(std::string_view title, const Histogram& first, const Histogram& last,
                          std::string_view first_label, std::string_view last_label) {
  if (first.counts.size() != last.counts.size() || first.lo != last.lo || first.hi != last.hi) {
    throw ContractError("histogram_svg: histograms must share bins");
  }
  std::size_t peak = 1;
  for (auto c : first.counts) peak = std::max(peak, c);
  for (auto c : last.counts) peak = std::max(peak, c);
  std::ostringstream s;
  svg_open(s, title);
  axes(s, "interest entropy (bits)", "users", first.lo, first.hi, 0.0, static_cast<double>(peak));
  const double bw = kPlotW / static_cast<double>(first.counts.size());
  auto bars = [&](const Histogram& h, std::string_view color) {
    s << "<g fill=\"" << color << "\" fill-opacity=\"0.5\" stroke=\"none\">\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      if (h.counts[i] == 0) continue;
      const double bh = kPlotH * static_cast<double>(h.counts[i]) / static_cast<double>(peak);
      s << "<rect x=\"" << coord(kLeft + bw * static_cast<double>(i)) << "\" y=\"" << coord(kTop + kPlotH - bh)
        << "\" width=\"" << coord(bw) << "\" height=\"" << coord(bh) << "\"/>\n";
    }
    s << "</g>\n";
  };
  bars(first, "#1f77b4");
  bars(last, "#d62728");
  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect x=\"" << coord(kLeft + kPlotW - 150) << "\" y=\"" << coord(kTop) << "\" width=\"10\" height=\"10\" "
    << "fill=\"#1f77b4\" fill-opacity=\"0.5\"/>\n"
    << "<text x=\"" << coord(kLeft + kPlotW - 134) << "\" y=\"" << coord(kTop + 9) << "\">" << xml_escape(first_label)
    << "</text>\n"
    << "<rect x=\"" << coord(kLeft + kPlotW - 150) << "\" y=\"" << coord(kTop + 16)
    << "\" width=\"10\" height=\"10\" fill=\"#d62728\" fill-opacity=\"0.5\"/>\n"
    << "<text x=\"" << coord(kLeft + kPlotW - 134) << "\" y=\"" << coord(kTop + 25) << "\">" << xml_escape(last_label)
    << "</text>\n</g>\n</svg>\n";
  return s.str();
}

std::string trajectory_svg(std::string_view title, const std::vector<std::vector<double>>& series) {
  std::size_t len = 0;
  for (const auto& v : series) len = std::max(len, v.size());
  const double xmax = len > 1 ? static_cast<double>(len - 1) : 1.0;
  std::ostringstream s;
  svg_open(s, title);
  axes(s, "turn", "share of watched category", 0.0, xmax, 0.0, 1.0);
  s << "<g fill=\"none\" stroke=\"#1f77b4\" stroke-opacity=\"0.25\" stroke-width=\"0.8\">\n";
  for (const auto& v : series) {
    if (v.empty()) continue;
    s << "<polyline points=\"";
    for (std::size_t t = 0; t < v.size(); ++t) {
      if (t) s << ' ';
      const double y = std::clamp(v[t], 0.0, 1.0);
      s << coord(kLeft + kPlotW * static_cast<double>(t) / xmax) << ',' << coord(kTop + kPlotH * (1.0 - y));
    }
    s << "\"/>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace newsflow
