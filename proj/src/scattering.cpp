#include "treewalk/scattering.hpp"

#include <cmath>

#include "treewalk/spectral.hpp"

namespace treewalk {

const char* to_string(WaveMode mode) {
  switch (mode) {
    case WaveMode::kTriple: return "triple";
    case WaveMode::kShift: return "shift";
    case WaveMode::kTilde: return "tilde";
  }
  return "?";
}

WaveMode wave_mode_from_string(const std::string& name) {
  if (name == "triple") return WaveMode::kTriple;
  if (name == "shift") return WaveMode::kShift;
  if (name == "tilde") return WaveMode::kTilde;
  throw ConfigError("unknown wave mode \"" + name + "\"");
}

namespace {

bool forward(TimeDirection dir) { return dir == TimeDirection::kForward; }

WalkState walk_steps(const CoinField& coin, const WalkState& s, int n, bool fwd,
                     const EvolutionLimits& limits) {
  WalkState out = s;
  for (int i = 0; i < n; ++i) {
    out = fwd ? apply_U(coin, out, limits) : apply_U_inv(coin, out, limits);
  }
  return out;
}

WalkState plain_shift_steps(const WalkState& s, int n, bool fwd,
                            const EvolutionLimits& limits) {
  WalkState out = s;
  for (int i = 0; i < n; ++i) {
    out = fwd ? apply_S(out, limits) : apply_S_inv(out, limits);
  }
  return out;
}

/// J_n = (sum_k chi_k C_k)^n: the n-th power of the class coin, a diagonal
/// phase depending on (class, spin) only.
WalkState class_coin_power(const CoinField& coin, const WalkState& s, int n) {
  WalkState out = s;
  std::array<std::array<Complex, 3>, 3> f;
  for (int k = 0; k < 3; ++k) {
    for (int spin = 0; spin < 3; ++spin) {
      f[k][spin] = std::polar(1.0, n * coin.config().phases[k][spin]);
    }
  }
  for (auto& [site, v] : out.amplitudes()) {
    const int k = site.chi_class() - 1;
    for (int spin = 0; spin < 3; ++spin) v[spin] *= f[k][spin];
  }
  return out;
}

TripleState free_steps(const CoinField& coin, const TripleState& t, int n, bool fwd,
                       const EvolutionLimits& limits) {
  TripleState out = t;
  for (int i = 0; i < n; ++i) {
    out = fwd ? apply_U0(coin, out, limits) : apply_U0_inv(coin, out, limits);
  }
  return out;
}

WalkState tilde_steps(const CoinField& coin, const WalkState& s, int n, bool fwd,
                      const EvolutionLimits& limits) {
  WalkState out = s;
  for (int i = 0; i < n; ++i) {
    out = fwd ? apply_U_tilde0(coin, out, limits) : apply_U_tilde0_inv(coin, out, limits);
  }
  return out;
}

}  // namespace

WalkState wave_iterate_triple(const CoinField& coin, TimeDirection dir, int n,
                              const TripleState& input, const EvolutionLimits& limits) {
  const bool fwd = forward(dir);
  const WalkState glued = apply_J(free_steps(coin, input, n, fwd, limits));
  return walk_steps(coin, glued, n, !fwd, limits);
}

WalkState wave_iterate_shift(const CoinField& coin, TimeDirection dir, int n,
                             const WalkState& input, const EvolutionLimits& limits) {
  const bool fwd = forward(dir);
  const WalkState shifted = plain_shift_steps(input, n, fwd, limits);
  const WalkState identified = class_coin_power(coin, shifted, fwd ? n : -n);
  return walk_steps(coin, identified, n, !fwd, limits);
}

WalkState wave_iterate_tilde(const CoinField& coin, TimeDirection dir, int n,
                             const WalkState& input, const EvolutionLimits& limits) {
  const bool fwd = forward(dir);
  const WalkState free_evolved = tilde_steps(coin, input, n, fwd, limits);
  return walk_steps(coin, free_evolved, n, !fwd, limits);
}

TripleState wave_adjoint_triple(const CoinField& coin, TimeDirection dir, int n,
                                const WalkState& input, const EvolutionLimits& limits) {
  const bool fwd = forward(dir);
  const WalkState evolved = walk_steps(coin, input, n, fwd, limits);
  return free_steps(coin, apply_J_star(evolved), n, !fwd, limits);
}

WalkState wave_adjoint_shift(const CoinField& coin, TimeDirection dir, int n,
                             const WalkState& input, const EvolutionLimits& limits) {
  const bool fwd = forward(dir);
  const WalkState evolved = walk_steps(coin, input, n, fwd, limits);
  const WalkState unidentified = class_coin_power(coin, evolved, fwd ? -n : n);
  return plain_shift_steps(unidentified, n, !fwd, limits);
}

WalkState wave_adjoint_tilde(const CoinField& coin, TimeDirection dir, int n,
                             const WalkState& input, const EvolutionLimits& limits) {
  const bool fwd = forward(dir);
  const WalkState evolved = walk_steps(coin, input, n, fwd, limits);
  return tilde_steps(coin, evolved, n, !fwd, limits);
}

namespace {

/// The increment || W_{n+1} input - W_n input || equals the distance between
/// the free-frame states X_{n+1} and (one walk step of X_n), because the
/// common return trip U^{-(n+1)} is unitary.  Measuring it there avoids the
/// catastrophic cancellation of two nearly equal long evolutions: when the
/// two branches coincide structurally (diagonal coins once the orbit has
/// cleared the root) the amplitudes cancel bitwise and the increment is an
/// exact zero.  The same factoring turns || W_n input || into || X_n ||.
ConvergenceRecord study_impl(WaveMode mode, TimeDirection dir, double input_norm,
                             int n_max, const ConvergenceThresholds& thresholds,
                             WalkState initial,
                             const std::function<WalkState()>& advance,
                             const std::function<WalkState(const WalkState&)>& walk_step) {
  ConvergenceRecord rec;
  rec.mode = mode;
  rec.direction = dir;
  rec.n_max = n_max;
  rec.thresholds = thresholds;

  WalkState cur = std::move(initial);
  rec.isometry_defects.push_back(std::abs(cur.norm() - input_norm));
  for (int n = 1; n <= n_max; ++n) {
    WalkState next = advance();
    rec.increments.push_back(distance(next, walk_step(cur)));
    rec.isometry_defects.push_back(std::abs(next.norm() - input_norm));
    cur = std::move(next);
  }

  rec.slope = log_log_slope(rec.increments, thresholds.fit_first, n_max - 1);
  rec.tail_sum = 0.0;
  rec.tail_exactly_zero = true;
  for (int n = thresholds.tail_first; n <= n_max - 1 && n >= 0; ++n) {
    const double inc = rec.increments[static_cast<std::size_t>(n)];
    rec.tail_sum += inc;
    if (inc != 0.0) rec.tail_exactly_zero = false;
  }
  const bool slope_ok =
      rec.tail_exactly_zero || (rec.slope && *rec.slope <= thresholds.slope);
  rec.converged = slope_ok && rec.tail_sum <= thresholds.tail;
  return rec;
}

}  // namespace

ConvergenceRecord convergence_study(const CoinField& coin, WaveMode mode,
                                    TimeDirection dir, const TripleState& input,
                                    int n_max, const ConvergenceThresholds& thresholds,
                                    const EvolutionLimits& limits) {
  if (mode != WaveMode::kTriple) {
    throw ConfigError("triple-state input requires the triple wave mode");
  }
  const bool fwd = forward(dir);
  TripleState orbit = input;
  const auto advance = std::function<WalkState()>([&]() {
    orbit = fwd ? apply_U0(coin, orbit, limits) : apply_U0_inv(coin, orbit, limits);
    return apply_J(orbit);
  });
  const auto walk_step = std::function<WalkState(const WalkState&)>(
      [&](const WalkState& s) {
        return fwd ? apply_U(coin, s, limits) : apply_U_inv(coin, s, limits);
      });
  return study_impl(mode, dir, input.norm(), n_max, thresholds, apply_J(input),
                    advance, walk_step);
}

ConvergenceRecord convergence_study(const CoinField& coin, WaveMode mode,
                                    TimeDirection dir, const WalkState& input,
                                    int n_max, const ConvergenceThresholds& thresholds,
                                    const EvolutionLimits& limits) {
  const bool fwd = forward(dir);
  const auto walk_step = std::function<WalkState(const WalkState&)>(
      [&](const WalkState& s) {
        return fwd ? apply_U(coin, s, limits) : apply_U_inv(coin, s, limits);
      });
  switch (mode) {
    case WaveMode::kTriple: {
      return convergence_study(coin, mode, dir, TripleState::diagonal(input), n_max,
                               thresholds, limits);
    }
    case WaveMode::kShift: {
      WalkState base = input;
      int count = 0;
      const auto advance = std::function<WalkState()>([&, count]() mutable {
        base = fwd ? apply_S(base, limits) : apply_S_inv(base, limits);
        ++count;
        return class_coin_power(coin, base, fwd ? count : -count);
      });
      return study_impl(mode, dir, input.norm(), n_max, thresholds, input, advance,
                        walk_step);
    }
    case WaveMode::kTilde: {
      WalkState free_cur = input;
      const auto advance = std::function<WalkState()>([&]() {
        free_cur = fwd ? apply_U_tilde0(coin, free_cur, limits)
                       : apply_U_tilde0_inv(coin, free_cur, limits);
        return free_cur;
      });
      return study_impl(mode, dir, input.norm(), n_max, thresholds, input, advance,
                        walk_step);
    }
  }
  throw ConfigError("unknown wave mode");
}

double intertwining_defect(const CoinField& coin, WaveMode mode, TimeDirection dir,
                           int n, int monomial_power, const TripleState& input,
                           const EvolutionLimits& limits) {
  const bool fwd = forward(dir);
  const int m = monomial_power;
  WalkState lhs, rhs;
  switch (mode) {
    case WaveMode::kTriple:
    case WaveMode::kShift: {
      const TripleState advanced = free_steps(coin, input, m, fwd, limits);
      lhs = wave_iterate_triple(coin, dir, n, advanced, limits);
      rhs = walk_steps(coin, wave_iterate_triple(coin, dir, n, input, limits), m, fwd, limits);
      break;
    }
    case WaveMode::kTilde: {
      const WalkState single = input.comp[0];
      const WalkState advanced = tilde_steps(coin, single, m, fwd, limits);
      lhs = wave_iterate_tilde(coin, dir, n, advanced, limits);
      rhs = walk_steps(coin, wave_iterate_tilde(coin, dir, n, single, limits), m, fwd, limits);
      break;
    }
  }
  return distance(lhs, rhs);
}

ChainCheckSample chain_and_completeness_check(const CoinField& coin,
                                              const WalkState& probe, int n,
                                              const EvolutionLimits& limits) {
  // Every comparison is made in the forward frame: the common return trip
  // U^{-n} preserves norms, and retracing it numerically would only smear
  // roundoff over an exponentially growing support.
  ChainCheckSample out;
  out.glue_identity = distance(apply_J(apply_J_star(probe)), probe);

  const WalkState evolved = walk_steps(coin, probe, n, true, limits);

  // b_n splits the evolved state into channels and rewinds them freely; a_n
  // re-runs the free evolution and glues.  Their composition reproduces the
  // evolved state because the channel coins never mix channel supports.
  const TripleState split = free_steps(coin, apply_J_star(evolved), n, false, limits);
  WalkState summed;
  for (int k = 0; k < 3; ++k) summed.add_scaled(split.comp[k], Complex(1.0, 0.0));
  summed.prune();
  const WalkState rebuilt =
      apply_J(free_steps(coin, TripleState::diagonal(summed), n, true, limits));
  out.reconstruction = distance(rebuilt, evolved);

  out.chain_defect = distance(apply_J(apply_J_star(evolved)), evolved);
  return out;
}

ChannelMassSeries channel_masses(const CoinField& coin, const WalkState& probe, int n,
                                 const EvolutionLimits& limits) {
  ChannelMassSeries series;
  WalkState cur = probe;
  for (int step = 0; step <= n; ++step) {
    if (step > 0) cur = apply_U(coin, cur, limits);
    std::array<double, 3> m{};
    for (int k = 0; k < 3; ++k) m[static_cast<std::size_t>(k)] = mask_class(cur, k + 1).norm();
    series.masses.push_back(m);
  }

  const int quarter = std::max(2, n / 4);
  for (int k = 0; k < 3; ++k) {
    double drift = 0.0;
    int count = 0;
    for (int step = n - quarter + 1; step <= n; ++step) {
      if (step <= 0) continue;
      drift += std::abs(series.masses[static_cast<std::size_t>(step)][static_cast<std::size_t>(k)] -
                        series.masses[static_cast<std::size_t>(step - 1)][static_cast<std::size_t>(k)]);
      ++count;
    }
    series.cesaro_variation[static_cast<std::size_t>(k)] = count ? drift / count : 0.0;
  }
  return series;
}

}  // namespace treewalk
