#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "newsflow/model.hpp"

namespace newsflow {

struct AnalysisConfig {
  PeriodWindow window1{1, 10};
  PeriodWindow window2{36, 45};
  std::size_t min_reads = 0;
  std::size_t max_reads = static_cast<std::size_t>(-1);
  double link_threshold = 0.62;
  std::size_t min_readers = 100;

  void validate() const;
  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct ExecutionConfig {
  // 0 = available cores.
  int workers = 0;
  std::string out_dir = "newsflow-out";

  int resolved_workers() const noexcept;
  friend bool operator==(const ExecutionConfig&, const ExecutionConfig&) = default;
};

/// The whole configuration document: sections "simulation", "analysis" and
/// "execution". Missing keys keep their defaults; unknown keys are rejected.
struct AppConfig {
  SimConfig simulation;
  AnalysisConfig analysis;
  ExecutionConfig execution;

  friend bool operator==(const AppConfig&, const AppConfig&) = default;
};

nlohmann::json to_json(const SimConfig& c);
nlohmann::json to_json(const AppConfig& c);

// Overlays `doc` onto `base`. A run manifest is accepted too: its "config"
// member is used.
AppConfig merge_config(AppConfig base, const nlohmann::json& doc);
AppConfig parse_config(std::string_view text, AppConfig base = {});
AppConfig load_config(const std::filesystem::path& path, AppConfig base = {});

// NEWSFLOW_SEED overlay; `value` is the raw variable (nullptr = unset).
void apply_seed_env(AppConfig& config, const char* value);

}  // namespace newsflow
