#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treewalk/coin.hpp"
#include "treewalk/state.hpp"
#include "treewalk/walk_ops.hpp"

namespace treewalk {

/// Finite-time wave comparisons between the walk and its free references.
///   triple: U^{-n} J U0^n          (reference space -> walk space)
///   shift:  U^{-n} J_n S^n         (walk space, J_n the n-step class coin)
///   tilde:  U^{-n} Utilde0^n       (walk space)
/// Backward direction replaces n by -n throughout.
enum class WaveMode { kTriple, kShift, kTilde };
enum class TimeDirection { kForward, kBackward };

const char* to_string(WaveMode mode);
WaveMode wave_mode_from_string(const std::string& name);

WalkState wave_iterate_triple(const CoinField& coin, TimeDirection dir, int n,
                              const TripleState& input,
                              const EvolutionLimits& limits = {});
WalkState wave_iterate_shift(const CoinField& coin, TimeDirection dir, int n,
                             const WalkState& input,
                             const EvolutionLimits& limits = {});
WalkState wave_iterate_tilde(const CoinField& coin, TimeDirection dir, int n,
                             const WalkState& input,
                             const EvolutionLimits& limits = {});

/// Adjoint iterates, e.g. U0^{-n} J* U^n for the triple mode.
TripleState wave_adjoint_triple(const CoinField& coin, TimeDirection dir, int n,
                                const WalkState& input,
                                const EvolutionLimits& limits = {});
WalkState wave_adjoint_shift(const CoinField& coin, TimeDirection dir, int n,
                             const WalkState& input,
                             const EvolutionLimits& limits = {});
WalkState wave_adjoint_tilde(const CoinField& coin, TimeDirection dir, int n,
                             const WalkState& input,
                             const EvolutionLimits& limits = {});

struct ConvergenceThresholds {
  double slope = -1.3;          // fitted decay exponent must be at most this
  double tail = 0.05;           // sum of increments over the tail window
  int fit_first = 4;
  int tail_first = 8;
};

struct ConvergenceRecord {
  WaveMode mode = WaveMode::kTriple;
  TimeDirection direction = TimeDirection::kForward;
  int n_max = 0;
  std::vector<double> increments;        // ||W_{n+1} - W_n||, index n = 0..n_max-1
  std::vector<double> isometry_defects;  // | ||W_n input|| - ||input|| |, n = 0..n_max
  std::optional<double> slope;           // log-log fit over [fit_first, n_max-1]
  double tail_sum = 0.0;                 // increments over [tail_first, n_max-1]
  bool tail_exactly_zero = false;
  bool converged = false;
  ConvergenceThresholds thresholds;
};

/// Triple-mode study; the other overload runs the single-space modes.
ConvergenceRecord convergence_study(const CoinField& coin, WaveMode mode,
                                    TimeDirection dir, const TripleState& input,
                                    int n_max,
                                    const ConvergenceThresholds& thresholds = {},
                                    const EvolutionLimits& limits = {});
ConvergenceRecord convergence_study(const CoinField& coin, WaveMode mode,
                                    TimeDirection dir, const WalkState& input,
                                    int n_max,
                                    const ConvergenceThresholds& thresholds = {},
                                    const EvolutionLimits& limits = {});

/// || W_n(free^m input) - U^m W_n(input) ||.  The shift mode delegates to its
/// triple representation (the two iterates agree exactly).
double intertwining_defect(const CoinField& coin, WaveMode mode, TimeDirection dir,
                           int n, int monomial_power, const TripleState& input,
                           const EvolutionLimits& limits = {});

struct ChainCheckSample {
  double glue_identity = 0.0;     // || J J* phi - phi ||
  double reconstruction = 0.0;    // || a_n(b_n(phi)) - phi ||
  double chain_defect = 0.0;      // || U^{-n} J J* U^n phi - phi ||
};

ChainCheckSample chain_and_completeness_check(const CoinField& coin,
                                              const WalkState& probe, int n,
                                              const EvolutionLimits& limits = {});

struct ChannelMassSeries {
  // masses[step][k] = || chi_{k+1} U^step phi ||, step = 0..n.
  std::vector<std::array<double, 3>> masses;
  std::array<double, 3> cesaro_variation{};  // averaged drift over the last quarter
};

ChannelMassSeries channel_masses(const CoinField& coin, const WalkState& probe, int n,
                                 const EvolutionLimits& limits = {});

}  // namespace treewalk
