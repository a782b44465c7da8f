#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "treewalk/coin.hpp"
#include "treewalk/point_scan.hpp"
#include "treewalk/scattering.hpp"
#include "treewalk/spectral.hpp"
#include "treewalk/state.hpp"

namespace treewalk {

enum class ExperimentKind { kIdentityCheck, kSpectrum, kMourre, kWave, kFullReport };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

/// A probe state described in configuration: either an explicit basis
/// vector, a seeded random cloud near the root, or a seeded random state on
/// a fixed shell.  Optional walk steps spread it before use.
struct ProbeSpec {
  struct Basis {
    TreeWord site;
    int spin = 1;  // 1-based in config
  };
  struct Random {
    std::uint64_t seed = 1;
    int radius = 2;
    int sites = 4;
  };
  struct Shell {
    std::uint64_t seed = 1;
    int norm = 4;
    int sites = 4;
  };
  std::variant<Basis, Random, Shell> kind = Basis{};
  int evolve = 0;

  WalkState resolve(const CoinField& coin, const EvolutionLimits& limits) const;
  std::string label() const;
};

struct ExperimentConfig {
  CoinConfig coin;
  int radius = 14;         // identity-check ball radius
  int hs_radius = 12;      // Hilbert-Schmidt cross-check ball radius
  int checks = 100;        // randomized identity check count
  int degree = 24;         // moment degree
  int filter_degree = 10;  // arc filter degree
  int grid = 512;          // density grid size
  SmoothingKernel kernel = SmoothingKernel::kJackson;
  std::vector<SpectralWindow> windows;
  std::vector<ProbeSpec> probes;
  std::vector<WaveMode> modes{WaveMode::kTriple, WaveMode::kShift, WaveMode::kTilde};
  TimeDirection direction = TimeDirection::kForward;
  int n_max = 16;
  double smooth_s = 1.0;
  int smooth_n_max = 64;
  double drop_tolerance = 0.0;
  EvolutionLimits limits{};
  ConvergenceThresholds thresholds{};
  ScanOptions scan{};
  std::vector<int> scan_radii{8, 9};
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

/// Parses the JSON config, rejecting unknown keys at every level.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Fully resolved configuration (defaults filled in), embedded into reports.
nlohmann::ordered_json resolved_config_json(const ExperimentConfig& config);

nlohmann::ordered_json coin_config_json(const CoinConfig& coin);
CoinConfig parse_coin_config(const nlohmann::json& j);

}  // namespace treewalk
