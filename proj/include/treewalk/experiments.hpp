#pragma once

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "treewalk/experiment_config.hpp"
#include "treewalk/report.hpp"

namespace treewalk {

struct ExperimentResult {
  std::vector<CheckResult> checks;
  nlohmann::ordered_json sections = nlohmann::ordered_json::object();
  std::vector<CsvArtifact> tables;
  std::vector<std::pair<std::string, nlohmann::ordered_json>> json_files;

  bool passed() const { return all_passed(checks); }
};

ExperimentResult run_identity_check(const ExperimentConfig& config);
ExperimentResult run_spectrum(const ExperimentConfig& config);
ExperimentResult run_mourre(const ExperimentConfig& config);
ExperimentResult run_wave(const ExperimentConfig& config);
ExperimentResult run_full_report(const ExperimentConfig& config);

ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& config);

/// Loads the config, applies CLI overrides, runs the experiment and writes
/// report.json plus the CSV/JSON artifacts under out_dir.  Returns 0 when
/// every check passed, 1 otherwise; ConfigError and CapacityError propagate
/// to the caller.
int run_experiment_to_directory(ExperimentKind kind, const std::string& config_path,
                                const std::filesystem::path& out_dir,
                                std::optional<int> threads,
                                std::optional<std::uint64_t> seed);

}  // namespace treewalk
