#include "newsflow/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "newsflow/analytics.hpp"
#include "newsflow/config.hpp"
#include "newsflow/report.hpp"
#include "newsflow/stats.hpp"

#ifndef NEWSFLOW_VERSION
#define NEWSFLOW_VERSION "0.0.0"
#endif

namespace newsflow {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view version() noexcept { return NEWSFLOW_VERSION; }

namespace {

std::string scenario_tag(RecommenderKind k) {
  switch (k) {
    case RecommenderKind::ContentBase: return "content";
    case RecommenderKind::Collaborative: return "collaborative";
    case RecommenderKind::NonRecommendation: return "nonrec";
    case RecommenderKind::All: return "all";
  }
  return "unknown";
}

PeriodWindow parse_window(const std::string& text, const char* flag) {
  const auto sep = text.find_first_of(":-,");
  int a = 0, b = 0;
  auto parse = [&](std::string_view s, int& v) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size() && !s.empty();
  };
  if (sep == std::string::npos || !parse(std::string_view(text).substr(0, sep), a) ||
      !parse(std::string_view(text).substr(sep + 1), b)) {
    throw ConfigError(std::string(flag) + ": expected START:END, got '" + text + "'");
  }
  return {a, b};
}

std::string to_text(const auto& writer_fn) {
  std::ostringstream s;
  writer_fn(s);
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json make_manifest(std::string_view command, const AppConfig& cfg, const json& extra,
                   const std::vector<std::string>& outputs, double duration) {
  json m{{"tool", "newsflow"},
         {"version", std::string(version())},
         {"command", std::string(command)},
         {"seed", cfg.simulation.seed},
         {"config", to_json(cfg)},
         {"outputs", outputs},
         {"duration_seconds", duration}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  return m;
}

// Base config: defaults < file < NEWSFLOW_SEED.
AppConfig base_config(const std::string& config_path, const char* seed_env, json* raw = nullptr) {
  AppConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("--config: cannot open " + config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
      doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ConfigError("config: " + std::string(e.what()));
    }
    cfg = merge_config(cfg, doc);
    if (raw) *raw = std::move(doc);
  }
  apply_seed_env(cfg, seed_env);
  return cfg;
}

struct SimulateArgs {
  std::string config;
  std::string scenario;
  bool all_scenarios = false;
  int turns = 0, runs = 0, users = 0, workers = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, const CLI::App& sub, std::ostream& out, const char* seed_env) {
  const auto t0 = std::chrono::steady_clock::now();
  json raw;
  AppConfig cfg = base_config(a.config, seed_env, &raw);

  std::vector<RecommenderKind> scenarios{cfg.simulation.recommender};
  if (raw.is_object() && raw.contains("scenarios") && raw.contains("config")) {
    scenarios.clear();
    for (const auto& s : raw.at("scenarios")) scenarios.push_back(parse_recommender(s.get<std::string>()));
  }
  if (sub.count("--scenario")) scenarios = {parse_recommender(a.scenario)};
  if (a.all_scenarios) scenarios.assign(std::begin(kAllRecommenderKinds), std::end(kAllRecommenderKinds));
  if (sub.count("--turns")) cfg.simulation.turns = a.turns;
  if (sub.count("--runs")) cfg.simulation.runs = a.runs;
  if (sub.count("--users")) cfg.simulation.n_users = a.users;
  if (sub.count("--seed")) cfg.simulation.seed = a.seed;
  if (sub.count("--workers")) cfg.execution.workers = a.workers;
  if (sub.count("--out")) cfg.execution.out_dir = a.out;
  cfg.simulation.recommender = scenarios.front();
  cfg.simulation.validate();

  const fs::path root = cfg.execution.out_dir;
  const int workers = cfg.execution.resolved_workers();
  std::vector<std::string> outputs;
  json summaries = json::array();
  json tags = json::array();
  for (RecommenderKind kind : scenarios) {
    SimConfig sc = cfg.simulation;
    sc.recommender = kind;
    const auto ts = std::chrono::steady_clock::now();
    const BatchResult batch = run_batch(sc, workers);
    const ScenarioSummary summary = summarize_scenario(batch);
    const std::string tag = scenario_tag(kind);
    const fs::path dir = root / tag;
    write_file_atomic(dir / "metrics.csv", to_text([&](std::ostream& s) { write_metrics_csv(s, batch); }));
    write_file_atomic(dir / "users.csv", to_text([&](std::ostream& s) { write_user_diversity_csv(s, batch); }));
    write_file_atomic(dir / "trajectories.csv",
                      to_text([&](std::ostream& s) { write_trajectories_csv(s, batch); }));
    json sj = to_json(summary);
    write_file_atomic(dir / "summary.json", sj.dump(2) + "\n");
    for (const char* f : {"metrics.csv", "users.csv", "trajectories.csv", "summary.json"}) {
      outputs.push_back(tag + "/" + f);
    }
    summaries.push_back(sj);
    tags.push_back(tag);
    out << to_string(kind) << ": ACE first " << format_double(std::round(summary.ace_first * 1000) / 1000)
        << ", last " << format_double(std::round(summary.ace_last * 1000) / 1000) << ", MCC "
        << format_double(std::round(summary.mcc * 100) / 100) << "% (" << summary.runs << " runs, "
        << format_double(std::round(seconds_since(ts) * 10) / 10) << " s)\n";
  }
  write_file_atomic(root / "summary.json", summaries.dump(2) + "\n");
  outputs.push_back("summary.json");
  const json manifest = make_manifest("simulate", cfg, json{{"scenarios", tags}, {"workers", workers}}, outputs,
                                      seconds_since(t0));
  write_file_atomic(root / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << root.string() << "\n";
  return kExitOk;
}

struct ClusterArgs {
  std::string config, log, out;
  double threshold = 0.62;
  std::size_t min_readers = 100;
  bool jaccard = false;
  bool include_isolated = false;
  std::uint64_t seed = 0;
};

int cmd_cluster(const ClusterArgs& a, const CLI::App& sub, std::ostream& out, const char* seed_env) {
  const auto t0 = std::chrono::steady_clock::now();
  AppConfig cfg = base_config(a.config, seed_env);
  if (sub.count("--threshold")) cfg.analysis.link_threshold = a.threshold;
  if (sub.count("--min-readers")) cfg.analysis.min_readers = a.min_readers;
  if (sub.count("--seed")) cfg.simulation.seed = a.seed;
  if (sub.count("--out")) cfg.execution.out_dir = a.out;
  if (!(cfg.analysis.link_threshold >= 0.0)) throw ConfigError("--threshold: must be >= 0");

  const BrowseLog full = read_browse_log(a.log);
  const BrowseLog log = filter_articles(full, cfg.analysis.min_readers);
  const ArticleGraph graph =
      build_article_graph(log, cfg.analysis.link_threshold, a.jaccard ? SimilarityKind::Jaccard : SimilarityKind::Simpson);
  RngStream rng(cfg.simulation.seed, 0);
  LouvainStats ls;
  const Partition part = louvain(graph, rng, &ls);

  // Isolated articles sit in singleton communities; they are left out unless asked for.
  ArticleGraph shown = graph;
  Partition shown_part = part;
  if (!a.include_isolated) {
    const auto deg = graph.degrees();
    shown.nodes.clear();
    shown_part.community.clear();
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
      if (deg[i] == 0) continue;
      shown.nodes.push_back(graph.nodes[i]);
      shown_part.community.push_back(part.community[i]);
    }
    shown_part.community = canonical_labels(shown_part.community);
  }
  std::size_t isolated = 0;
  for (auto d : graph.degrees()) isolated += d == 0;

  const fs::path root = cfg.execution.out_dir;
  write_file_atomic(root / "edges.csv", to_text([&](std::ostream& s) { write_edges_csv(s, graph); }));
  write_file_atomic(root / "communities.csv",
                    to_text([&](std::ostream& s) { write_communities_csv(s, shown, shown_part); }));
  const json summary{{"articles_in_log", full.article_ids().size()},
                     {"nodes", graph.node_count()},
                     {"links", graph.edges.size()},
                     {"isolated_nodes", isolated},
                     {"communities", shown_part.community_count()},
                     {"modularity", part.modularity},
                     {"louvain_levels", ls.levels},
                     {"similarity", a.jaccard ? "jaccard" : "simpson"},
                     {"threshold", cfg.analysis.link_threshold},
                     {"min_readers", cfg.analysis.min_readers}};
  write_file_atomic(root / "summary.json", summary.dump(2) + "\n");
  const json manifest =
      make_manifest("cluster", cfg,
                    json{{"log", fs::absolute(a.log).string()},
                         {"similarity", a.jaccard ? "jaccard" : "simpson"},
                         {"include_isolated", a.include_isolated}},
                    {"edges.csv", "communities.csv", "summary.json"}, seconds_since(t0));
  write_file_atomic(root / "manifest.json", manifest.dump(2) + "\n");
  out << "nodes " << graph.node_count() << ", links " << graph.edges.size() << ", communities "
      << shown_part.community_count() << ", Q " << format_double(part.modularity) << "\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string config, log, communities, window1, window2, out;
  std::size_t min_reads = 0, max_reads = 0;
};

int cmd_analyze(const AnalyzeArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err,
                const char* seed_env) {
  const auto t0 = std::chrono::steady_clock::now();
  AppConfig cfg = base_config(a.config, seed_env);
  if (sub.count("--window1")) cfg.analysis.window1 = parse_window(a.window1, "--window1");
  if (sub.count("--window2")) cfg.analysis.window2 = parse_window(a.window2, "--window2");
  if (sub.count("--min-reads")) cfg.analysis.min_reads = a.min_reads;
  if (sub.count("--max-reads")) cfg.analysis.max_reads = a.max_reads;
  if (sub.count("--out")) cfg.execution.out_dir = a.out;
  cfg.analysis.validate();

  const BrowseLog log = read_browse_log(a.log);
  const CommunityMap communities = read_communities(a.communities);
  std::set<ArticleId> uncovered;
  for (ArticleId id : log.article_ids()) {
    if (!communities.count(id)) uncovered.insert(id);
  }
  if (!uncovered.empty()) {
    err << "warning: " << uncovered.size() << " logged article(s) have no community and are ignored\n";
  }
  const ClusterDiversity div = cluster_diversity(log, communities, cfg.analysis.window1, cfg.analysis.window2,
                                                 {cfg.analysis.min_reads, cfg.analysis.max_reads});

  json cohorts_json;
  std::vector<CommunityAffinity> affinity;
  if (div.users.size() >= 2) {
    const CohortReport cohorts = cohort_split(div.users);
    cohorts_json = to_json(cohorts);
    if (!cohorts.increasing.empty() && !cohorts.decreasing.empty()) {
      affinity = cluster_affinity_diff(log, communities, cohorts);
    } else {
      err << "warning: a cohort is empty; affinity ranking skipped\n";
    }
  } else {
    cohorts_json = to_json(CohortReport{});
    cohorts_json["total_users"] = div.users.size();
    err << "warning: fewer than two users qualify; cohorts not formed\n";
  }

  std::vector<double> h1, h2;
  for (const auto& u : div.users) {
    h1.push_back(u.h1);
    h2.push_back(u.h2);
  }
  json tests = nullptr;
  try {
    const auto t = stats::welch_t_test(h2, h1);
    tests = json{{"t", t.t}, {"df", t.df}, {"p", t.p}};
  } catch (const DataError&) {
  }
  const json summary{{"users", div.users.size()},
                     {"uncovered_articles", uncovered.size()},
                     {"uncovered_records", div.uncovered_records},
                     {"mean_h1", h1.empty() ? 0.0 : stats::mean(h1)},
                     {"mean_h2", h2.empty() ? 0.0 : stats::mean(h2)},
                     {"welch_h2_vs_h1", tests}};

  const fs::path root = cfg.execution.out_dir;
  write_file_atomic(root / "diversity.csv", to_text([&](std::ostream& s) { write_diversity_csv(s, div.users); }));
  write_file_atomic(root / "cohorts.json", cohorts_json.dump(2) + "\n");
  write_file_atomic(root / "affinity.csv", to_text([&](std::ostream& s) { write_affinity_csv(s, affinity); }));
  write_file_atomic(root / "summary.json", summary.dump(2) + "\n");
  const json manifest = make_manifest(
      "analyze", cfg,
      json{{"log", fs::absolute(a.log).string()}, {"communities", fs::absolute(a.communities).string()}},
      {"diversity.csv", "cohorts.json", "affinity.csv", "summary.json"}, seconds_since(t0));
  write_file_atomic(root / "manifest.json", manifest.dump(2) + "\n");
  out << "users " << div.users.size() << ", mean H1 " << format_double(summary["mean_h1"].get<double>())
      << ", mean H2 " << format_double(summary["mean_h2"].get<double>()) << "\n";
  return kExitOk;
}

int cmd_report(const std::string& bundle, std::ostream& out) {
  const fs::path root = bundle;
  if (!fs::is_directory(root)) throw DataError("bundle not found: " + bundle);
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && fs::exists(e.path() / "metrics.csv")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw DataError("no scenario metrics under " + bundle);

  PeriodWindow w1{1, 10}, w2{36, 45};
  if (fs::exists(root / "manifest.json")) {
    const AppConfig cfg = load_config(root / "manifest.json");
    w1 = cfg.simulation.resolved_first_window();
    w2 = cfg.simulation.resolved_last_window();
  }
  std::size_t written = 0;
  for (const auto& dir : dirs) {
    const std::string tag = dir.filename().string();
    const CsvTable metrics = read_csv(dir / "metrics.csv");
    if (metrics.rows.empty()) throw DataError(tag + "/metrics.csv: no rows");

    const CsvTable users = read_csv(dir / "users.csv");
    if (users.rows.empty()) throw DataError(tag + "/users.csv: no users");
    const std::size_t c1 = users.column("h1"), c2 = users.column("h2");
    std::vector<double> h1, h2;
    double hi = 0.0;
    for (std::size_t i = 0; i < users.rows.size(); ++i) {
      h1.push_back(csv_double(users.rows[i][c1], users.line[i], "h1"));
      h2.push_back(csv_double(users.rows[i][c2], users.line[i], "h2"));
      hi = std::max({hi, h1.back(), h2.back()});
    }
    hi = std::max(1.0, std::ceil(hi));
    const auto hist1 = make_histogram(h1, 0.0, hi, 40), hist2 = make_histogram(h2, 0.0, hi, 40);
    const std::string label1 = "turns " + std::to_string(w1.start) + "-" + std::to_string(w1.end);
    const std::string label2 = "turns " + std::to_string(w2.start) + "-" + std::to_string(w2.end);
    write_file_atomic(dir / "histogram.svg", histogram_svg(tag + ": interest entropy", hist1, hist2, label1, label2));

    const CsvTable traj = read_csv(dir / "trajectories.csv");
    if (traj.rows.empty()) throw DataError(tag + "/trajectories.csv: no users");
    const std::size_t ct = traj.column("turn"), cu = traj.column("user_id"), cs = traj.column("watch_share");
    std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, double>>> per_user;
    for (std::size_t i = 0; i < traj.rows.size(); ++i) {
      const auto& r = traj.rows[i];
      per_user[csv_uint(r[cu], traj.line[i], "user_id")].emplace_back(csv_uint(r[ct], traj.line[i], "turn"),
                                                                      csv_double(r[cs], traj.line[i], "watch_share"));
    }
    std::vector<std::vector<double>> series;
    for (auto& [u, pts] : per_user) {
      std::sort(pts.begin(), pts.end());
      std::vector<double> ys;
      for (const auto& p : pts) ys.push_back(p.second);
      series.push_back(std::move(ys));
    }
    write_file_atomic(dir / "trajectory.svg", trajectory_svg(tag + ": watched category share by user", series));
    written += 2;
  }
  out << "wrote " << written << " SVG files under " << root.string() << "\n";
  return kExitOk;
}

struct SynthArgs {
  int blocks = 5, articles = 200, users = 500, days = 45;
  double read_probability = 0.8, noise = 0.05;
  std::uint64_t seed = 20170601;
  std::string out, truth;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  PlantedLogSpec spec{a.blocks, a.articles, a.users, a.read_probability, a.noise, a.days};
  RngStream rng(a.seed, 0);
  const PlantedLog planted = planted_partition_log(spec, rng);
  write_file_atomic(a.out, to_text([&](std::ostream& s) { write_browse_log(s, planted.log); }));
  if (!a.truth.empty()) {
    write_file_atomic(a.truth, to_text([&](std::ostream& s) {
                        CsvWriter w(s, {"article_id", "community_id"});
                        for (std::size_t i = 0; i < planted.article_block.size(); ++i) {
                          w.field(static_cast<std::uint64_t>(i)).field(planted.article_block[i]);
                          w.end_row();
                        }
                      }));
  }
  out << "wrote " << planted.log.size() << " records to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const char* seed_env) {
  CLI::App app{"Agent-based news recommendation simulator and browsing-log analysis", "newsflow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run simulation batches and write a report bundle");
  simulate->add_option("--config", sim.config, "Configuration JSON (or a previous run manifest)");
  simulate->add_option("--scenario", sim.scenario, "content | collaborative | nonrec | all");
  simulate->add_flag("--all-scenarios", sim.all_scenarios, "Run the four scenarios");
  simulate->add_option("--turns", sim.turns, "Turns per run");
  simulate->add_option("--runs", sim.runs, "Runs per scenario");
  simulate->add_option("--users", sim.users, "Number of users");
  simulate->add_option("--seed", sim.seed, "Base seed");
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = all cores)");
  simulate->add_option("--out", sim.out, "Output directory");

  ClusterArgs cl;
  auto* cluster = app.add_subcommand("cluster", "Build the article graph from a browsing log and detect communities");
  cluster->add_option("--config", cl.config, "Configuration JSON");
  cluster->add_option("--log", cl.log, "Browsing log CSV (user_id,article_id,day)")->required();
  cluster->add_option("--threshold", cl.threshold, "Minimum similarity for a link");
  cluster->add_option("--min-readers", cl.min_readers, "Drop articles with fewer readers");
  cluster->add_flag("--jaccard", cl.jaccard, "Use Jaccard instead of Simpson similarity");
  cluster->add_flag("--include-isolated", cl.include_isolated, "List unlinked articles in communities.csv");
  cluster->add_option("--seed", cl.seed, "Seed for the node visit order");
  cluster->add_option("--out", cl.out, "Output directory");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Per-user cluster entropy across two periods and cohort comparison");
  analyze->add_option("--config", an.config, "Configuration JSON");
  analyze->add_option("--log", an.log, "Browsing log CSV")->required();
  analyze->add_option("--communities", an.communities, "Community CSV (article_id,community_id)")->required();
  analyze->add_option("--window1", an.window1, "First period START:END");
  analyze->add_option("--window2", an.window2, "Second period START:END");
  analyze->add_option("--min-reads", an.min_reads, "Minimum reads within the two periods");
  analyze->add_option("--max-reads", an.max_reads, "Maximum reads within the two periods");
  analyze->add_option("--out", an.out, "Output directory");

  std::string bundle;
  auto* report = app.add_subcommand("report", "Render SVG charts for a simulation bundle");
  report->add_option("--bundle", bundle, "Directory written by simulate")->required();

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth-log", "Write a planted-community browsing log");
  synth->add_option("--blocks", sy.blocks, "Planted communities")->capture_default_str();
  synth->add_option("--articles", sy.articles, "Articles in the log")->capture_default_str();
  synth->add_option("--users", sy.users, "Users in the log")->capture_default_str();
  synth->add_option("--days", sy.days, "Days spanned by the log")->capture_default_str();
  synth->add_option("--read-probability", sy.read_probability, "Chance a user reads an article of its own block")->capture_default_str();
  synth->add_option("--noise", sy.noise, "Fraction of reads sent outside the user's block")->capture_default_str();
  synth->add_option("--seed", sy.seed, "Seed")->capture_default_str();
  synth->add_option("--out", sy.out, "Log CSV to write")->required();
  synth->add_option("--truth", sy.truth, "Optional ground-truth community CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim, *simulate, out, seed_env);
    if (*cluster) return cmd_cluster(cl, *cluster, out, seed_env);
    if (*analyze) return cmd_analyze(an, *analyze, out, err, seed_env);
    if (*report) return cmd_report(bundle, out);
    if (*synth) return cmd_synth(sy, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace newsflow
