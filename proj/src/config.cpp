#include "newsflow/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

namespace newsflow {

using nlohmann::json;

void AnalysisConfig::validate() const {
  auto check_window = [](const PeriodWindow& w, const char* name) {
    if (w.start < 0 || w.end < w.start) {
      throw ConfigError(std::string(name) + ": need 0 <= start <= end");
    }
  };
  check_window(window1, "analysis.window1");
  check_window(window2, "analysis.window2");
  if (window1.overlaps(window2)) throw ConfigError("analysis.window2: overlaps analysis.window1");
  if (min_reads > max_reads) throw ConfigError("analysis.min_reads: exceeds max_reads");
  if (!(link_threshold >= 0.0)) throw ConfigError("analysis.link_threshold: must be >= 0");
}

int ExecutionConfig::resolved_workers() const noexcept {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

json window_json(const PeriodWindow& w) { return json::array({w.start, w.end}); }

PeriodWindow window_from(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    throw ConfigError(key + ": expected [start, end]");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

template <class T>
T number(const json& v, const std::string& key) {
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number");
  } else {
    if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
        throw ConfigError(key + ": must be >= 0");
      }
    }
  }
  return v.get<T>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

const json& section(const json& doc, const char* name) {
  static const json empty = json::object();
  auto it = doc.find(name);
  if (it == doc.end()) return empty;
  if (!it->is_object()) throw ConfigError(std::string(name) + ": expected an object");
  return *it;
}

void merge_simulation(SimConfig& c, const json& s) {
  for (const auto& [k, v] : s.items()) {
    const std::string key = "simulation." + k;
    if (k == "turns") c.turns = number<int>(v, key);
    else if (k == "runs") c.runs = number<int>(v, key);
    else if (k == "n_users") c.n_users = number<int>(v, key);
    else if (k == "n_categories") c.n_categories = number<int>(v, key);
    else if (k == "pool_size") c.pool_size = number<int>(v, key);
    else if (k == "articles_per_day") c.articles_per_day = number<int>(v, key);
    else if (k == "presented_per_day") c.presented_per_day = number<int>(v, key);
    else if (k == "top_per_day") c.top_per_day = number<int>(v, key);
    else if (k == "reads_per_day") c.reads_per_day = number<int>(v, key);
    else if (k == "elite_reads") c.elite_reads = number<int>(v, key);
    else if (k == "cf_neighbors") c.cf_neighbors = number<int>(v, key);
    else if (k == "nonrec_shortlist") c.nonrec_shortlist = number<int>(v, key);
    else if (k == "threshold") c.threshold = number<double>(v, key);
    else if (k == "w") c.w = number<double>(v, key);
    else if (k == "r") c.r = number<double>(v, key);
    else if (k == "max_failed_draws") c.max_failed_draws = number<int>(v, key);
    else if (k == "random_admixture") c.random_admixture = number<double>(v, key);
    else if (k == "recommender") {
      try {
        c.recommender = parse_recommender(text(v, key));
      } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
      }
    } else if (k == "init_distribution") {
      try {
        c.init_distribution = parse_init_distribution(text(v, key));
      } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
      }
    } else if (k == "seed") c.seed = number<std::uint64_t>(v, key);
    else if (k == "watch_category") c.watch_category = number<int>(v, key);
    else if (k == "first_window") c.first_window = window_from(v, key);
    else if (k == "last_window") c.last_window = window_from(v, key);
    else throw ConfigError(key + ": unknown key");
  }
}

void merge_analysis(AnalysisConfig& c, const json& s) {
  for (const auto& [k, v] : s.items()) {
    const std::string key = "analysis." + k;
    if (k == "window1") c.window1 = window_from(v, key);
    else if (k == "window2") c.window2 = window_from(v, key);
    else if (k == "min_reads") c.min_reads = number<std::size_t>(v, key);
    else if (k == "max_reads") c.max_reads = v.is_null() ? static_cast<std::size_t>(-1) : number<std::size_t>(v, key);
    else if (k == "link_threshold") c.link_threshold = number<double>(v, key);
    else if (k == "min_readers") c.min_readers = number<std::size_t>(v, key);
    else throw ConfigError(key + ": unknown key");
  }
}

void merge_execution(ExecutionConfig& c, const json& s) {
  for (const auto& [k, v] : s.items()) {
    const std::string key = "execution." + k;
    if (k == "workers") c.workers = number<int>(v, key);
    else if (k == "out_dir") c.out_dir = text(v, key);
    else throw ConfigError(key + ": unknown key");
  }
}

}  // namespace

json to_json(const SimConfig& c) {
  return json{{"turns", c.turns},
              {"runs", c.runs},
              {"n_users", c.n_users},
              {"n_categories", c.n_categories},
              {"pool_size", c.pool_size},
              {"articles_per_day", c.articles_per_day},
              {"presented_per_day", c.presented_per_day},
              {"top_per_day", c.top_per_day},
              {"reads_per_day", c.reads_per_day},
              {"elite_reads", c.elite_reads},
              {"cf_neighbors", c.cf_neighbors},
              {"nonrec_shortlist", c.nonrec_shortlist},
              {"threshold", c.threshold},
              {"w", c.w},
              {"r", c.r},
              {"max_failed_draws", c.max_failed_draws},
              {"random_admixture", c.random_admixture},
              {"recommender", std::string(to_string(c.recommender))},
              {"init_distribution", std::string(to_string(c.init_distribution))},
              {"seed", c.seed},
              {"watch_category", c.watch_category},
              {"first_window", window_json(c.first_window)},
              {"last_window", window_json(c.last_window)}};
}

json to_json(const AppConfig& c) {
  json analysis{{"window1", window_json(c.analysis.window1)},
                {"window2", window_json(c.analysis.window2)},
                {"min_reads", c.analysis.min_reads},
                {"link_threshold", c.analysis.link_threshold},
                {"min_readers", c.analysis.min_readers}};
  analysis["max_reads"] =
      c.analysis.max_reads == static_cast<std::size_t>(-1) ? json(nullptr) : json(c.analysis.max_reads);
  return json{{"simulation", to_json(c.simulation)},
              {"analysis", analysis},
              {"execution", {{"workers", c.execution.workers}, {"out_dir", c.execution.out_dir}}}};
}

AppConfig merge_config(AppConfig base, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  const json& root = doc.contains("config") && doc.contains("seed") ? doc.at("config") : doc;
  for (const auto& [k, v] : root.items()) {
    if (k != "simulation" && k != "analysis" && k != "execution") {
      throw ConfigError(k + ": unknown section");
    }
  }
  merge_simulation(base.simulation, section(root, "simulation"));
  merge_analysis(base.analysis, section(root, "analysis"));
  merge_execution(base.execution, section(root, "execution"));
  return base;
}

AppConfig parse_config(std::string_view text, AppConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return merge_config(std::move(base), doc);
}

AppConfig load_config(const std::filesystem::path& path, AppConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void apply_seed_env(AppConfig& config, const char* value) {
  if (value == nullptr || *value == '\0') return;
  const std::string_view s(value);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("NEWSFLOW_SEED: expected an unsigned integer, got '" + std::string(s) + "'");
  }
  config.simulation.seed = seed;
}

}  // namespace newsflow
