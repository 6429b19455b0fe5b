#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "newsflow/analytics.hpp"
#include "newsflow/cli.hpp"
#include "newsflow/config.hpp"
#include "newsflow/graphcluster.hpp"
#include "newsflow/report.hpp"
#include "newsflow/simengine.hpp"

namespace py = pybind11;
using namespace newsflow;

namespace {

AppConfig config_from(const std::string& json_text) {
  return json_text.empty() ? AppConfig{} : parse_config(json_text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "newsflow native core";
  m.attr("__version__") = std::string(version());

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DegenerateVectorError>(m, "DegenerateVectorError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);

  m.def("entropy", [](std::vector<double> p) { return entropy(CategoryVector(std::move(p))); }, py::arg("p"));
  m.def("simpson", [](std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) { return simpson(a, b); });
  m.def("jaccard", [](std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) { return jaccard(a, b); });
  m.def("nmi", [](std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) {
    return normalized_mutual_information(a, b);
  });

  m.def("default_config_json", [] { return to_json(AppConfig{}).dump(); });

  // Returns the scenario summary as a JSON string.
  m.def(
      "simulate_summary",
      [](const std::string& config_json, int workers) {
        const AppConfig cfg = config_from(config_json);
        BatchResult batch;
        {
          py::gil_scoped_release release;
          batch = run_batch(cfg.simulation, workers);
        }
        return to_json(summarize_scenario(batch)).dump();
      },
      py::arg("config_json") = "", py::arg("workers") = 1);

  // (user, article, day) triples -> (article ids, community ids, modularity)
  m.def(
      "cluster_log",
      [](const std::vector<std::tuple<UserId, ArticleId, int>>& triples, double threshold, std::size_t min_readers,
         std::uint64_t seed) {
        std::vector<BrowseRecord> recs;
        recs.reserve(triples.size());
        for (const auto& [u, a, d] : triples) recs.push_back({u, a, d});
        const ArticleGraph g = build_article_graph(filter_articles(BrowseLog(std::move(recs)), min_readers), threshold);
        RngStream rng(seed, 0);
        const Partition p = louvain(g, rng);
        return py::make_tuple(g.nodes, p.community, p.modularity, g.edges.size());
      },
      py::arg("records"), py::arg("threshold") = 0.62, py::arg("min_readers") = 100, py::arg("seed") = 20170601);

  m.def(
      "planted_log",
      [](int blocks, int articles, int users, double read_probability, double noise, std::uint64_t seed) {
        RngStream rng(seed, 0);
        const PlantedLog p = planted_partition_log({blocks, articles, users, read_probability, noise, 45}, rng);
        std::vector<std::tuple<UserId, ArticleId, int>> out;
        for (const auto& r : p.log.records()) out.emplace_back(r.user, r.article, r.day);
        return py::make_tuple(out, p.article_block);
      },
      py::arg("blocks") = 5, py::arg("articles") = 200, py::arg("users") = 500, py::arg("read_probability") = 0.8,
      py::arg("noise") = 0.05, py::arg("seed") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, std::optional<std::string> seed_env) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err, seed_env ? seed_env->c_str() : nullptr);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("seed_env") = py::none());
}
