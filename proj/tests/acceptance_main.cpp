// Acceptance gate for the library: eleven numbered criteria, each printed as
// one [PASS]/[FAIL] line with its measured values.  Tolerances are pinned
// here, in code, so a run documents exactly what was required.  The process
// exits nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "treewalk/ball.hpp"
#include "treewalk/coin.hpp"
#include "treewalk/conjugate.hpp"
#include "treewalk/point_scan.hpp"
#include "treewalk/scattering.hpp"
#include "treewalk/spectral.hpp"
#include "treewalk/state.hpp"
#include "treewalk/walk_ops.hpp"
#include "treewalk/word.hpp"

using namespace treewalk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

template <class State>
std::function<State(const State&)> fn(std::function<State(const State&)> f) {
  return f;
}

CoinConfig pure_config() {
  CoinConfig cfg;
  cfg.preset = CoinPreset::kPure;
  return cfg;
}

CoinConfig smooth_config() {
  CoinConfig cfg;
  cfg.preset = CoinPreset::kSmoothDecay;  // eps = 1 in every channel by default
  return cfg;
}

Matrix3cd swap_matrix(double beta) {
  Matrix3cd m = Matrix3cd::Zero();
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  m(2, 2) = std::polar(1.0, beta);
  return m;
}

// Strong localized defect: spin swaps at the root and its third neighbour
// close an exact two-step loop, so the walk has genuine point spectrum.
CoinConfig strong_defect_config() {
  CoinConfig cfg;
  cfg.preset = CoinPreset::kFiniteDefect;
  cfg.defects.emplace_back(TreeWord{}, swap_matrix(0.7));
  cfg.defects.emplace_back(TreeWord::parse("3"), swap_matrix(0.7));
  return cfg;
}

int count_stable(const ScanResult& r) {
  int n = 0;
  for (const auto& c : r.candidates) {
    if (c.stable) ++n;
  }
  return n;
}

struct Gate {
  int failures = 0;

  void report(int number, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s  (%s)\n", ok ? "PASS" : "FAIL", number, name,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

}  // namespace

int main() {
  Gate gate;

  // -------------------------------------------------------------------------
  // 1. Second-difference identity of the squared modified norms, exhaustive
  //    over ball(14) and all six ordered shift pairs, in under 10 seconds.
  // -------------------------------------------------------------------------
  {
    const auto start = Clock::now();
    const SecondDifferenceReport rep = verify_second_difference(14);
    const double secs = seconds_since(start);
    const std::uint64_t expected = static_cast<std::uint64_t>(ball_size(14)) * 6ull;
    const bool ok = rep.ok() && rep.checked == expected && secs < 10.0;
    gate.report(1, "second-difference identity on ball(14)", ok,
                fmt("checked=%llu of %llu, failures=%zu, time=%.2fs (limit 10s)",
                    static_cast<unsigned long long>(rep.checked),
                    static_cast<unsigned long long>(expected), rep.failures.size(), secs));
  }

  // -------------------------------------------------------------------------
  // 2. Commutator scalars of the free dynamics: U0^{-1}[A0,U0] = 2 and
  //    Utilde0^{-1}[Atilde,Utilde0] = 2, relative error <= 1e-12 on 100
  //    random local states each.
  // -------------------------------------------------------------------------
  {
    const CoinField coin(smooth_config());
    const auto u0f = fn<TripleState>([&](const TripleState& t) { return apply_U0(coin, t); });
    const auto u0b = fn<TripleState>([&](const TripleState& t) { return apply_U0_inv(coin, t); });
    const auto a0 = fn<TripleState>([](const TripleState& t) { return apply_A0(t); });
    const auto utf = fn<WalkState>([&](const WalkState& s) { return apply_U_tilde0(coin, s); });
    const auto utb = fn<WalkState>([&](const WalkState& s) { return apply_U_tilde0_inv(coin, s); });
    const auto at = fn<WalkState>([](const WalkState& s) { return apply_A_tilde(s); });

    double worst_triple = 0.0;
    double worst_walk = 0.0;
    for (std::uint64_t c = 0; c < 100; ++c) {
      const TripleState Phi = random_local_triple(9000 + c, 2);
      TripleState lhs = commutator_form<TripleState>(u0f, u0b, a0, Phi);
      lhs.add_scaled(Phi, Complex(-2.0, 0.0));
      worst_triple = std::max(worst_triple, lhs.norm() / Phi.norm());

      const WalkState phi = random_local_state(9100 + c, 2);
      WalkState wl = commutator_form<WalkState>(utf, utb, at, phi);
      wl.add_scaled(phi, Complex(-2.0, 0.0));
      worst_walk = std::max(worst_walk, wl.norm() / phi.norm());
    }
    const bool ok = worst_triple <= 1e-12 && worst_walk <= 1e-12;
    gate.report(2, "free commutator scalars equal 2", ok,
                fmt("100 states each: triple rel err %.2e, glued rel err %.2e (tol 1e-12)",
                    worst_triple, worst_walk));
  }

  // -------------------------------------------------------------------------
  // 3. Identification algebra: J J* = 1 on the walk space and J* J = the
  //    channel projections, with exactly zero error on 100 random states.
  // -------------------------------------------------------------------------
  {
    double worst_glue = 0.0;
    double worst_proj = 0.0;
    for (std::uint64_t c = 0; c < 100; ++c) {
      const WalkState psi = random_local_state(9200 + c, 3);
      worst_glue = std::max(worst_glue, distance(apply_J(apply_J_star(psi)), psi));

      const TripleState Phi = random_local_triple(9300 + c, 3);
      TripleState masked;
      for (int k = 0; k < 3; ++k) masked.comp[k] = mask_class(Phi.comp[k], k + 1);
      worst_proj = std::max(worst_proj, distance(apply_J_star(apply_J(Phi)), masked));
    }
    const bool ok = worst_glue == 0.0 && worst_proj == 0.0;
    gate.report(3, "glue identities J J* = 1 and J* J = channel masks", ok,
                fmt("100 states each: max |J J* - 1| err %.1e, max |J* J - masks| err %.1e "
                    "(required exactly 0)",
                    worst_glue, worst_proj));
  }

  // -------------------------------------------------------------------------
  // 4. The conjugate operator transported through J equals the directly
  //    defined multiplication operator, exactly, on 100 random states.
  // -------------------------------------------------------------------------
  {
    double worst = 0.0;
    for (std::uint64_t c = 0; c < 100; ++c) {
      const WalkState psi = random_local_state(9400 + c, 3);
      worst = std::max(worst, distance(apply_A_via_J(psi), apply_A_tilde(psi)));
    }
    gate.report(4, "conjugate operator agrees through the glue map", worst == 0.0,
                fmt("100 states: max err %.1e (required exactly 0)", worst));
  }

  // -------------------------------------------------------------------------
  // 5. Perturbation factorization V = G* G0 to 1e-12, and the weighted
  //    Hilbert-Schmidt sum over ball(12) against its sphere-wise closed form
  //    to 1e-10.
  // -------------------------------------------------------------------------
  {
    const CoinField coin(smooth_config());
    double worst = 0.0;
    for (std::uint64_t c = 0; c < 100; ++c) {
      const TripleState Phi = random_local_triple(9500 + c, 2);
      const WalkState direct = apply_V(coin, Phi);
      const WalkState factored = apply_G_star(coin, apply_G0(coin, Phi));
      worst = std::max(worst, distance(direct, factored) / Phi.norm());
    }

    const int hs_radius = 12;
    BallIndex ball;
    ball.build(hs_radius);
    double worst_hs = 0.0;
    for (int k = 1; k <= 3; ++k) {
      const double s = (1.0 + coin.eps(k)) / 2.0;
      double enumerated = 0.0;
      for (std::size_t i = 0; i < ball.size(); ++i) {
        enumerated += 3.0 * std::pow(japanese_bracket(ball.word(i).norm()), -2.0 * s);
      }
      double closed = 3.0;  // the root site
      for (int m = 1; m <= hs_radius; ++m) {
        closed += 3.0 * static_cast<double>(sphere_size(m)) *
                  std::pow(japanese_bracket(m), -2.0 * s);
      }
      worst_hs = std::max(worst_hs, std::abs(enumerated - closed));
    }
    const bool ok = worst <= 1e-12 && worst_hs <= 1e-10;
    gate.report(5, "V = G* G0 and Hilbert-Schmidt closed form", ok,
                fmt("100 states: factorization rel err %.2e (tol 1e-12); ball(12) sum err "
                    "%.2e (tol 1e-10)",
                    worst, worst_hs));
  }

  // -------------------------------------------------------------------------
  // 6. Commutator positivity. Free dynamics: filtered Rayleigh quotients are
  //    the exact scalar 2 (+-1e-10) over 5 windows x 10 probes. Perturbed
  //    walk (smooth decay, eps = 1): probes on shells r in {4, 8, 16} keep
  //    the quotient above 2 - 1.5/r, and the defect decays with fitted
  //    exponent <= -0.8. Whole criterion under 2 minutes.
  // -------------------------------------------------------------------------
  {
    const auto start = Clock::now();
    const CoinField coin(smooth_config());
    const std::vector<SpectralWindow> windows = {
        {-2.2, 0.4}, {-1.1, 0.4}, {0.0, 0.4}, {1.1, 0.4}, {2.2, 0.4}};
    std::vector<ArcFilter> filters;
    for (const auto& w : windows) filters.push_back(ArcFilter::build(w, 8));

    const Dynamics<TripleState> free_dyn = free_dynamics(coin);
    const auto a0 = fn<TripleState>([](const TripleState& t) { return apply_A0(t); });
    double worst_free = 0.0;
    int used = 0;
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      for (std::uint64_t p = 0; p < 10; ++p) {
        const TripleState probe = random_local_triple(9600 + p, 2);
        const MourreSample s = mourre_rayleigh<TripleState>(free_dyn, a0, filters[wi], probe);
        if (s.skipped) continue;
        ++used;
        worst_free = std::max(worst_free, std::abs(s.quotient - 2.0));
      }
    }

    const Dynamics<WalkState> walk_dyn = walk_dynamics(coin);
    const auto at = fn<WalkState>([](const WalkState& s) { return apply_A_tilde(s); });
    const int shells[] = {4, 8, 16};
    std::vector<double> log_r, log_defect;
    bool floor_ok = true;
    std::string shell_detail;
    for (const int r : shells) {
      std::optional<double> min_q;
      for (std::uint64_t p = 0; p < 3; ++p) {
        const WalkState probe =
            random_shell_state(2900 + static_cast<std::uint64_t>(r) * 10 + p, r);
        const std::vector<WalkState> filtered = apply_filter_bank(walk_dyn, filters, probe);
        for (const WalkState& psi : filtered) {
          const MourreSample s = mourre_rayleigh_filtered<WalkState>(walk_dyn, at, psi);
          if (s.skipped) continue;
          min_q = min_q ? std::min(*min_q, s.quotient) : s.quotient;
        }
      }
      const double defect = min_q ? 2.0 - *min_q : 1e9;
      if (!min_q || defect > 1.5 / static_cast<double>(r)) floor_ok = false;
      if (defect > 0.0 && defect < 1e9) {
        log_r.push_back(std::log(static_cast<double>(r)));
        log_defect.push_back(std::log(defect));
      }
      shell_detail += fmt("%sr=%d defect %.1e", shell_detail.empty() ? "" : ", ", r, defect);
    }
    std::optional<double> slope;
    if (log_r.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < log_r.size(); ++i) {
        sx += log_r[i];
        sy += log_defect[i];
        sxx += log_r[i] * log_r[i];
        sxy += log_r[i] * log_defect[i];
      }
      const double n = static_cast<double>(log_r.size());
      slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    const double secs = seconds_since(start);
    const bool ok = used == 50 && worst_free <= 1e-10 && floor_ok && slope &&
                    *slope <= -0.8 && secs < 120.0;
    gate.report(6, "commutator positivity (free exact, perturbed shell decay)", ok,
                fmt("free: %d/50 quotients, err %.1e (tol 1e-10); walk: %s, envelope 1.5/r, "
                    "slope %.2f (need <= -0.8); time %.1fs (limit 120s)",
                    used, worst_free, shell_detail.c_str(), slope ? *slope : 0.0, secs));
  }

  // -------------------------------------------------------------------------
  // 7. Wave-operator convergence. Smooth decay (eps = 1), triple mode,
  //    n_max = 16, normalized probes at the root: fitted increment slope
  //    <= -1.3 and tail sum over steps 8..16 at most 0.05. Pure preset:
  //    increments exactly zero from step 3 on. Shift mode: isometry defect
  //    zero at machine precision for every step.
  // -------------------------------------------------------------------------
  {
    const CoinField smooth(smooth_config());
    const CoinField pure(pure_config());
    const ConvergenceThresholds thresholds;  // slope -1.3, tail 0.05 over [8, ...]

    double worst_slope = -1e9;
    double worst_tail = 0.0;
    bool smooth_ok = true;
    for (int s = 0; s < 3; ++s) {
      TripleState probe = TripleState::diagonal(WalkState::basis(TreeWord{}, s));
      probe.scale(Complex(1.0 / std::sqrt(3.0), 0.0));
      const ConvergenceRecord rec = convergence_study(smooth, WaveMode::kTriple,
                                                      TimeDirection::kForward, probe, 16,
                                                      thresholds);
      if (!rec.slope) smooth_ok = false;
      if (rec.slope) worst_slope = std::max(worst_slope, *rec.slope);
      worst_tail = std::max(worst_tail, rec.tail_sum);
    }
    smooth_ok = smooth_ok && worst_slope <= -1.3 && worst_tail <= 0.05;

    double pure_late = 0.0;  // must be exactly zero
    for (int s = 0; s < 3; ++s) {
      TripleState diag = TripleState::diagonal(WalkState::basis(TreeWord{}, s));
      diag.scale(Complex(1.0 / std::sqrt(3.0), 0.0));
      TripleState single;
      single.comp[s] = WalkState::basis(TreeWord{}, s);
      for (const TripleState& probe : {diag, single}) {
        const ConvergenceRecord rec = convergence_study(pure, WaveMode::kTriple,
                                                        TimeDirection::kForward, probe, 16,
                                                        thresholds);
        for (std::size_t i = 3; i < rec.increments.size(); ++i) {
          pure_late = std::max(pure_late, rec.increments[i]);
        }
      }
    }

    double worst_isometry = 0.0;
    for (const CoinField* coin : {&smooth, &pure}) {
      for (int s = 0; s < 3; ++s) {
        const WalkState probe = WalkState::basis(TreeWord{}, s);
        const ConvergenceRecord rec = convergence_study(*coin, WaveMode::kShift,
                                                        TimeDirection::kForward, probe, 16,
                                                        thresholds);
        for (double d : rec.isometry_defects) worst_isometry = std::max(worst_isometry, d);
      }
    }

    const bool ok = smooth_ok && pure_late == 0.0 && worst_isometry <= 1e-14;
    gate.report(7, "wave-operator convergence", ok,
                fmt("smooth: slope %.2f (need <= -1.3), tail %.3f (tol 0.05); pure late "
                    "increments %.1e (required exactly 0); shift isometry defect %.1e "
                    "(tol 1e-14)",
                    worst_slope, worst_tail, pure_late, worst_isometry));
  }

  // -------------------------------------------------------------------------
  // 8. Finite-step adjoint duality: <W_n Phi, psi> = <Phi, W_n* psi> to
  //    1e-12 for every mode and every n <= 12 on normalized random states.
  // -------------------------------------------------------------------------
  {
    const CoinField coin(smooth_config());
    double worst = 0.0;
    for (int n = 1; n <= 12; ++n) {
      TripleState Phi = random_local_triple(9800 + static_cast<std::uint64_t>(n), 2);
      Phi.scale(Complex(1.0 / Phi.norm(), 0.0));
      WalkState phi = random_local_state(9850 + static_cast<std::uint64_t>(n), 2);
      phi.scale(Complex(1.0 / phi.norm(), 0.0));
      WalkState psi = random_local_state(9900 + static_cast<std::uint64_t>(n), 2);
      psi.scale(Complex(1.0 / psi.norm(), 0.0));

      for (const TimeDirection dir : {TimeDirection::kForward, TimeDirection::kBackward}) {
        worst = std::max(worst,
                         std::abs(inner_product(wave_iterate_triple(coin, dir, n, Phi), psi) -
                                  inner_product(Phi, wave_adjoint_triple(coin, dir, n, psi))));
        worst = std::max(worst,
                         std::abs(inner_product(wave_iterate_shift(coin, dir, n, phi), psi) -
                                  inner_product(phi, wave_adjoint_shift(coin, dir, n, psi))));
        worst = std::max(worst,
                         std::abs(inner_product(wave_iterate_tilde(coin, dir, n, phi), psi) -
                                  inner_product(phi, wave_adjoint_tilde(coin, dir, n, psi))));
      }
    }
    gate.report(8, "adjoint duality of the wave iterates", worst <= 1e-12,
                fmt("3 modes x 2 directions x n = 1..12: max err %.2e (tol 1e-12)", worst));
  }

  // -------------------------------------------------------------------------
  // 9. Spectral density. Free dynamics from a root basis state: every moment
  //    of order 1..32 vanishes exactly and the smoothed density is flat at
  //    1/(2 pi). Perturbed walk: the degree-32 Jackson density stays above
  //    0.01/(2 pi) on a 512-point grid. Under one minute.
  // -------------------------------------------------------------------------
  {
    const auto start = Clock::now();
    const double two_pi = 2.0 * std::numbers::pi;

    const CoinField pure(pure_config());
    TripleState probe;
    probe.comp[0] = WalkState::basis(TreeWord{}, 0);
    const MomentSequence free_seq = moments(free_dynamics(pure), probe, 32);
    double max_moment = 0.0;
    for (int n = 1; n <= 32; ++n) {
      max_moment = std::max(max_moment, std::abs(free_seq.at(n)));
      max_moment = std::max(max_moment, std::abs(free_seq.at(-n)));
    }
    const std::vector<double> flat =
        density_estimate(free_seq, 512, SmoothingKernel::kJackson);
    double flat_err = 0.0;
    for (double d : flat) flat_err = std::max(flat_err, std::abs(d - 1.0 / two_pi));

    const CoinField smooth(smooth_config());
    const WalkState walk_probe = WalkState::basis(TreeWord{}, 0);
    const MomentSequence walk_seq = moments(walk_dynamics(smooth), walk_probe, 32);
    const std::vector<double> density =
        density_estimate(walk_seq, 512, SmoothingKernel::kJackson);
    double min_density = density.empty() ? 0.0 : density[0];
    for (double d : density) min_density = std::min(min_density, d);
    const double floor = 0.01 / two_pi;

    const double secs = seconds_since(start);
    const bool ok = max_moment == 0.0 && free_seq.exact && flat_err <= 1e-14 &&
                    min_density >= floor && secs < 60.0;
    gate.report(9, "spectral density (free flat, perturbed strictly positive)", ok,
                fmt("free moments 1..32 max %.1e (required exactly 0), density err %.1e "
                    "(tol 1e-14); perturbed min density %.4f/(2pi) (floor 0.01/(2pi)); "
                    "time %.1fs (limit 60s)",
                    max_moment, flat_err, min_density * two_pi, secs));
  }

  // -------------------------------------------------------------------------
  // 10. Point-spectrum scan. Pure preset at R = 8 and 9: no stable
  //     candidates. A strong localized defect: the candidate set is either
  //     empty or stable to 1e-3 in phase across both radii.
  // -------------------------------------------------------------------------
  {
    const CoinField pure(pure_config());
    const std::vector<ScanResult> clean = scan_with_stability(pure, {8, 9});
    int clean_stable = 0;
    for (const auto& r : clean) clean_stable += count_stable(r);

    const CoinField defect(strong_defect_config());
    const std::vector<ScanResult> scarred = scan_with_stability(defect, {8, 9});
    const int stable8 = count_stable(scarred[0]);
    const int stable9 = count_stable(scarred[1]);
    // Stability already encodes cross-radius phase matching within 1e-3 (the
    // scan's phase tolerance); the sets must agree in size, and may be empty.
    const bool defect_ok = stable8 == stable9;

    const bool ok = clean_stable == 0 && defect_ok;
    gate.report(10, "point-spectrum scan (clean empty, defect stable)", ok,
                fmt("pure: %d stable candidates (need 0); defect: %d vs %d stable at "
                    "R=8/9 (phase match tol 1e-3)",
                    clean_stable, stable8, stable9));
  }

  // -------------------------------------------------------------------------
  // 11. Locally-smooth diagnostic at s = 1: the partial sums flatten (last
  //     increment below 1e-3 of the first) for the free dynamics and for the
  //     perturbed walk away from any detected point-spectrum candidates.
  // -------------------------------------------------------------------------
  {
    const CoinField smooth(smooth_config());
    const int n_max = 64;

    TripleState free_probe = TripleState::diagonal(WalkState::basis(TreeWord{}, 0));
    const SmoothSumSeries free_series =
        smooth_sum_diagnostic(free_dynamics(smooth), free_probe, 1.0, n_max);
    const double free_ratio = free_series.increments.back() / free_series.increments.front();

    // "Away from candidates": scan first; with no stable candidates the whole
    // circle qualifies and the probe needs no spectral restriction.
    const std::vector<ScanResult> scans = scan_with_stability(smooth, {6, 7});
    int stable = 0;
    for (const auto& r : scans) stable += count_stable(r);

    WalkState walk_probe;
    for (int s = 0; s < 3; ++s) {
      walk_probe.add_scaled(WalkState::basis(TreeWord{}, s), Complex(1.0, 0.0));
    }
    walk_probe.set_drop_tolerance(1e-7);
    const Dynamics<WalkState> walk_dyn = walk_dynamics(smooth);
    SmoothSumSeries walk_series;
    if (stable == 0) {
      walk_series = smooth_sum_diagnostic(walk_dyn, walk_probe, 1.0, n_max);
    } else {
      // Filter onto an arc away from the detected phases before summing.
      std::vector<double> phases;
      for (const auto& r : scans) {
        for (const auto& c : r.candidates) {
          if (c.stable) phases.push_back(c.phase);
        }
      }
      double center = 0.0, best_gap = -1.0;
      for (int t = 0; t < 64; ++t) {
        const double theta = -std::numbers::pi +
                             2.0 * std::numbers::pi * static_cast<double>(t) / 64.0;
        double gap = 1e9;
        for (double p : phases) {
          double d = std::abs(std::remainder(theta - p, 2.0 * std::numbers::pi));
          gap = std::min(gap, d);
        }
        if (gap > best_gap) {
          best_gap = gap;
          center = theta;
        }
      }
      const ArcFilter filter = ArcFilter::build({center, std::min(0.5, best_gap / 3.0)}, 8);
      walk_series = smooth_sum_diagnostic(walk_dyn, filter.apply(walk_dyn, walk_probe), 1.0,
                                          n_max);
    }
    const double walk_ratio = walk_series.increments.back() / walk_series.increments.front();

    const bool ok = free_ratio < 1e-3 && walk_ratio < 1e-3;
    gate.report(11, "locally-smooth partial sums flatten", ok,
                fmt("s=1, %d steps, last/first: free %.2e, perturbed %.2e (tol 1e-3; %d "
                    "candidates detected)",
                    n_max, free_ratio, walk_ratio, stable));
  }

  if (gate.failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", gate.failures);
  }
  return gate.failures == 0 ? 0 : 1;
}
