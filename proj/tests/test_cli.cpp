#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "newsflow/cli.hpp"
#include "newsflow/config.hpp"
#include "newsflow/report.hpp"

using namespace newsflow;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("newsflow-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args, const char* env = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err, env);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

const char* kSmallConfig = R"({
  "simulation": {"turns": 4, "runs": 2, "n_users": 40, "pool_size": 400, "articles_per_day": 100,
                 "presented_per_day": 30, "top_per_day": 15, "cf_neighbors": 5, "nonrec_shortlist": 20,
                 "seed": 5},
  "execution": {"workers": 1}
})";

// Minimal XML well-formedness check: balanced tags, quoted attributes, no scripts.
bool well_formed_svg(const std::string& s) {
  if (s.find("<script") != std::string::npos) return false;
  if (s.find("<svg") == std::string::npos || s.find("version=\"1.1\"") == std::string::npos) return false;
  std::vector<std::string> stack;
  for (std::size_t i = s.find('<'); i != std::string::npos; i = s.find('<', i + 1)) {
    const std::size_t close = s.find('>', i);
    if (close == std::string::npos) return false;
    std::string tag = s.substr(i + 1, close - i - 1);
    if (tag.empty()) return false;
    if (tag[0] == '?') continue;
    if (std::count(tag.begin(), tag.end(), '"') % 2) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find(' ')));
    }
  }
  return stack.empty();
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const AppConfig d;
  const AppConfig back = parse_config(to_json(d).dump());
  EXPECT_EQ(back, d);
  EXPECT_EQ(d.simulation, SimConfig{});
}

TEST(Config, RejectsUnknownAndMistypedKeys) {
  EXPECT_THROW(parse_config(R"({"simulation": {"turn": 3}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"sim": {}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"simulation": {"turns": "many"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"simulation": {"recommender": "popular"}})"), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
  try {
    parse_config(R"({"analysis": {"window1": [1]}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("analysis.window1"), std::string::npos);
  }
}

TEST(Config, SeedEnvironment) {
  AppConfig c;
  apply_seed_env(c, "123");
  EXPECT_EQ(c.simulation.seed, 123u);
  apply_seed_env(c, nullptr);
  EXPECT_EQ(c.simulation.seed, 123u);
  EXPECT_THROW(apply_seed_env(c, "12x"), ConfigError);
}

TEST(Csv, EscapingAndParsing) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::ostringstream s;
  CsvWriter w(s, {"name", "value"});
  w.field("x,y").field(1.5);
  w.end_row();
  w.field("line\nbreak").field(std::uint64_t{7});
  w.end_row();
  EXPECT_EQ(s.str(), "name,value\r\n\"x,y\",1.5\r\n\"line\nbreak\",7\r\n");
  const CsvTable t = parse_csv(s.str());
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "x,y");
  EXPECT_EQ(t.rows[1][0], "line\nbreak");
  EXPECT_EQ(t.line[1], 3u);
  EXPECT_THROW(w.field("a").field("b").field("c"), ContractError);
}

TEST(Csv, MalformedRowReportsLine) {
  try {
    parse_csv("user_id,article_id,day\n1,2,3\n4,5\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Csv, DoubleFormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 3.748, 1e-300, 12345678.9}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitConfig);
  EXPECT_EQ(cli({"bogus"}).code, kExitConfig);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"cluster"}).code, kExitConfig);
}

TEST(Cli, InvalidConfigGivesFieldMessage) {
  TempDir dir;
  write(dir / "bad.json", R"({"simulation": {"n_categories": 1}})");
  const auto r = cli({"simulate", "--config", (dir / "bad.json").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("n_categories"), std::string::npos);
}

TEST(Cli, ConfigPrecedence) {
  TempDir dir;
  write(dir / "c.json", kSmallConfig);
  const std::string c = (dir / "c.json").string();
  // file only
  ASSERT_EQ(cli({"simulate", "--config", c, "--out", (dir / "a").string()}).code, 0);
  auto m = nlohmann::json::parse(slurp(dir / "a/manifest.json"));
  EXPECT_EQ(m["config"]["simulation"]["turns"], 4);
  EXPECT_EQ(m["config"]["simulation"]["n_categories"], 20);  // built-in default
  EXPECT_EQ(m["seed"], 5);
  // env beats file, flag beats both
  ASSERT_EQ(cli({"simulate", "--config", c, "--turns", "3", "--out", (dir / "b").string()}, "77").code, 0);
  m = nlohmann::json::parse(slurp(dir / "b/manifest.json"));
  EXPECT_EQ(m["config"]["simulation"]["turns"], 3);
  EXPECT_EQ(m["seed"], 77);
  ASSERT_EQ(cli({"simulate", "--config", c, "--seed", "9", "--out", (dir / "c").string()}, "77").code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "c/manifest.json"))["seed"], 9);
}

TEST(Cli, SimulateBundleReproducibleAndWorkerIndependent) {
  TempDir dir;
  write(dir / "c.json", kSmallConfig);
  const std::string c = (dir / "c.json").string();
  ASSERT_EQ(cli({"simulate", "--config", c, "--all-scenarios", "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "--config", c, "--all-scenarios", "--workers", "8", "--out", (dir / "b").string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "--config", (dir / "a/manifest.json").string(), "--out", (dir / "r").string()}).code, 0);
  for (const char* s : {"content", "collaborative", "nonrec", "all"}) {
    for (const char* f : {"metrics.csv", "users.csv", "trajectories.csv"}) {
      const std::string a = slurp(dir / "a" / s / f);
      ASSERT_FALSE(a.empty());
      EXPECT_EQ(a, slurp(dir / "b" / s / f)) << s << "/" << f;
      EXPECT_EQ(a, slurp(dir / "r" / s / f)) << s << "/" << f;
    }
    const CsvTable metrics = read_csv(dir / "a" / s / "metrics.csv");
    EXPECT_EQ(metrics.rows.size(), 2u * (4 + 1));
    EXPECT_EQ(read_csv(dir / "a" / s / "users.csv").rows.size(), 2u * 40);
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "a/summary.json"));
  ASSERT_EQ(summary.size(), 4u);
  EXPECT_TRUE(summary[0].contains("ace_first"));
  EXPECT_TRUE(summary[0].contains("ace_last"));
  EXPECT_TRUE(summary[0].contains("mcc"));
}

TEST(Cli, ReportRendersSvgs) {
  TempDir dir;
  write(dir / "c.json", kSmallConfig);
  ASSERT_EQ(cli({"simulate", "--config", (dir / "c.json").string(), "--all-scenarios", "--out",
                 (dir / "b").string()}).code,
            0);
  const auto r = cli({"report", "--bundle", (dir / "b").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  int svgs = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "b")) {
    if (e.path().extension() == ".svg") {
      ++svgs;
      EXPECT_TRUE(well_formed_svg(slurp(e.path()))) << e.path();
    }
  }
  EXPECT_EQ(svgs, 8);
  for (const char* s : {"content", "collaborative", "nonrec", "all"}) {
    EXPECT_TRUE(fs::exists(dir / "b" / s / "histogram.svg"));
    EXPECT_TRUE(fs::exists(dir / "b" / s / "trajectory.svg"));
  }
}

TEST(Cli, ReportRejectsMissingOrEmpty) {
  TempDir dir;
  EXPECT_NE(cli({"report", "--bundle", (dir / "nothing").string()}).code, 0);
  fs::create_directories(dir / "b/content");
  write(dir / "b/content/metrics.csv", "run,turn,mean_entropy\r\n0,0,1\r\n");
  write(dir / "b/content/users.csv", "run,user_id,h1,h2,delta,argmax1,argmax2\r\n");
  write(dir / "b/content/trajectories.csv", "turn,user_id,watch_share\r\n");
  EXPECT_NE(cli({"report", "--bundle", (dir / "b").string()}).code, 0);
}

TEST(Cli, ClusterPlantedLog) {
  TempDir dir;
  ASSERT_EQ(cli({"synth-log", "--out", (dir / "log.csv").string(), "--truth", (dir / "truth.csv").string()}).code, 0);
  const auto r = cli({"cluster", "--log", (dir / "log.csv").string(), "--min-readers", "0", "--out",
                      (dir / "c").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(dir / "c/summary.json"));
  EXPECT_EQ(summary["communities"], 5);
  EXPECT_GT(summary["links"].get<int>(), 0);
  const CommunityMap found = read_communities(dir / "c/communities.csv");
  const CommunityMap truth = read_communities(dir / "truth.csv");
  std::vector<std::uint32_t> a, b;
  for (const auto& [article, c] : found) {
    a.push_back(c);
    b.push_back(truth.at(article));
  }
  EXPECT_GE(normalized_mutual_information(a, b), 0.9);
  EXPECT_EQ(read_csv(dir / "c/edges.csv").header, (std::vector<std::string>{"src", "dst", "weight"}));
  EXPECT_TRUE(fs::exists(dir / "c/manifest.json"));

  ASSERT_EQ(cli({"cluster", "--log", (dir / "log.csv").string(), "--min-readers", "0", "--threshold", "1.01",
                 "--out", (dir / "t").string()}).code,
            0);
  EXPECT_TRUE(read_csv(dir / "t/edges.csv").rows.empty());
}

TEST(Cli, ClusterEmptyAndMalformedLogs) {
  TempDir dir;
  write(dir / "empty.csv", "user_id,article_id,day\n");
  ASSERT_EQ(cli({"cluster", "--log", (dir / "empty.csv").string(), "--out", (dir / "e").string()}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "e/summary.json"))["modularity"], 0.0);
  EXPECT_TRUE(read_csv(dir / "e/communities.csv").rows.empty());

  write(dir / "bad.csv", "user_id,article_id,day\n1,2,3\n1,x,3\n");
  const auto r = cli({"cluster", "--log", (dir / "bad.csv").string(), "--out", (dir / "b").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
}

TEST(Cli, AnalyzeSingleUserAndWindows) {
  TempDir dir;
  write(dir / "log.csv", "user_id,article_id,day\n1,10,2\n1,11,40\n1,12,41\n");
  write(dir / "comm.csv", "article_id,community_id\n10,0\n11,0\n");
  const auto r = cli({"analyze", "--log", (dir / "log.csv").string(), "--communities", (dir / "comm.csv").string(),
                      "--window1", "1:10", "--window2", "36:45", "--out", (dir / "a").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("1 logged article"), std::string::npos);
  const CsvTable d = read_csv(dir / "a/diversity.csv");
  ASSERT_EQ(d.rows.size(), 1u);
  EXPECT_EQ(d.rows[0], (std::vector<std::string>{"1", "0", "0", "0", "0", "0"}));

  const auto overlap = cli({"analyze", "--log", (dir / "log.csv").string(), "--communities",
                            (dir / "comm.csv").string(), "--window1", "1:10", "--window2", "10:20"});
  EXPECT_EQ(overlap.code, kExitConfig);
}

TEST(Cli, AnalyzeReadBounds) {
  TempDir dir;
  std::ostringstream log;
  log << "user_id,article_id,day\n";
  // user 1: 12 reads; user 2: 4 reads; user 3: 120 reads
  for (int i = 0; i < 12; ++i) log << "1," << i << "," << (i < 6 ? 2 : 40) << "\n";
  for (int i = 0; i < 4; ++i) log << "2," << i << "," << (i < 2 ? 2 : 40) << "\n";
  for (int i = 0; i < 120; ++i) log << "3," << i << "," << (i < 60 ? 2 : 40) << "\n";
  write(dir / "log.csv", log.str());
  std::ostringstream comm;
  comm << "article_id,community_id\n";
  for (int i = 0; i < 120; ++i) comm << i << "," << i % 4 << "\n";
  write(dir / "comm.csv", comm.str());
  ASSERT_EQ(cli({"analyze", "--log", (dir / "log.csv").string(), "--communities", (dir / "comm.csv").string(),
                 "--min-reads", "10", "--max-reads", "100", "--out", (dir / "a").string()}).code,
            0);
  const CsvTable d = read_csv(dir / "a/diversity.csv");
  ASSERT_EQ(d.rows.size(), 1u);
  EXPECT_EQ(d.rows[0][0], "1");
}
