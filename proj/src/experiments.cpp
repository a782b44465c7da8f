#include "treewalk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "treewalk/ball.hpp"
#include "treewalk/conjugate.hpp"
#include "treewalk/point_scan.hpp"
#include "treewalk/scattering.hpp"
#include "treewalk/spectral.hpp"
#include "treewalk/walk_ops.hpp"

namespace treewalk {

namespace {

using nlohmann::ordered_json;

// ============================================================================
// job runner: deterministic results regardless of thread count, because each
// job writes only its own slot and reductions read the slots in index order.
// ============================================================================

void run_jobs(int threads, std::vector<std::function<void()>>& jobs) {
  if (threads <= 1 || jobs.size() <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        jobs[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(threads), jobs.size());
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<SpectralWindow> effective_windows(const ExperimentConfig& cfg) {
  if (!cfg.windows.empty()) return cfg.windows;
  std::vector<SpectralWindow> windows;
  for (double center : {-2.2, -1.1, 0.0, 1.1, 2.2}) {
    windows.push_back(SpectralWindow{center, 0.4});
  }
  return windows;
}

std::vector<ProbeSpec> effective_probes(const ExperimentConfig& cfg) {
  if (!cfg.probes.empty()) return cfg.probes;
  ProbeSpec root;
  root.kind = ProbeSpec::Basis{TreeWord{}, 1};
  return {root};
}

std::vector<ProbeSpec> effective_shell_probes(const ExperimentConfig& cfg) {
  std::vector<ProbeSpec> shells;
  for (const auto& p : cfg.probes) {
    if (std::holds_alternative<ProbeSpec::Shell>(p.kind)) shells.push_back(p);
  }
  if (!shells.empty()) return shells;
  for (int r : {4, 8, 16}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      ProbeSpec p;
      p.kind = ProbeSpec::Shell{cfg.seed * 100 + static_cast<std::uint64_t>(r) * 10 + s, r, 4};
      shells.push_back(p);
    }
  }
  return shells;
}

template <class State>
std::function<State(const State&)> fn(std::function<State(const State&)> f) {
  return f;
}

ordered_json thresholds_json(const ConvergenceThresholds& t) {
  return ordered_json{{"slope", t.slope},
                      {"tail", t.tail},
                      {"fit_first", t.fit_first},
                      {"tail_first", t.tail_first}};
}

}  // namespace

// ============================================================================
// identity-check
// ============================================================================

ExperimentResult run_identity_check(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const CoinField coin(cfg.coin);
  const EvolutionLimits& lim = cfg.limits;

  // --- exhaustive second-difference identity on the configured ball
  {
    const SecondDifferenceReport sd = verify_second_difference(cfg.radius);
    ordered_json sec;
    sec["radius"] = sd.radius;
    sec["pair_checks"] = sd.checked;
    sec["failures"] = sd.failures.size();
    res.sections["second_difference"] = sec;
    res.checks.push_back({"second-difference", sd.ok(),
                          ordered_json{{"radius", sd.radius}, {"failures", sd.failures.size()}}});
  }

  // --- exact commutator scalars for both free dynamics
  {
    const auto u0_fwd = fn<TripleState>([&](const TripleState& t) { return apply_U0(coin, t, lim); });
    const auto u0_bwd = fn<TripleState>([&](const TripleState& t) { return apply_U0_inv(coin, t, lim); });
    const auto a0 = fn<TripleState>([](const TripleState& t) { return apply_A0(t); });
    const auto ut_fwd = fn<WalkState>([&](const WalkState& s) { return apply_U_tilde0(coin, s, lim); });
    const auto ut_bwd = fn<WalkState>([&](const WalkState& s) { return apply_U_tilde0_inv(coin, s, lim); });
    const auto at = fn<WalkState>([](const WalkState& s) { return apply_A_tilde(s); });

    double worst_triple = 0.0;
    double worst_tilde = 0.0;
    for (int c = 0; c < cfg.checks; ++c) {
      const TripleState Phi = random_local_triple(cfg.seed * 7793 + static_cast<std::uint64_t>(c), 2);
      TripleState lhs = commutator_form<TripleState>(u0_fwd, u0_bwd, a0, Phi);
      lhs.add_scaled(Phi, Complex(-2.0, 0.0));
      worst_triple = std::max(worst_triple, lhs.norm() / Phi.norm());

      const WalkState phi = random_local_state(cfg.seed * 3331 + static_cast<std::uint64_t>(c), 2);
      WalkState tl = commutator_form<WalkState>(ut_fwd, ut_bwd, at, phi);
      tl.add_scaled(phi, Complex(-2.0, 0.0));
      worst_tilde = std::max(worst_tilde, tl.norm() / phi.norm());
    }
    res.sections["free_commutators"] = ordered_json{{"samples", cfg.checks},
                                                    {"max_triple_defect", worst_triple},
                                                    {"max_walk_defect", worst_tilde}};
    res.checks.push_back({"free-commutator-triple", worst_triple <= 1e-12,
                          ordered_json{{"max_defect", worst_triple}, {"tolerance", 1e-12}}});
    res.checks.push_back({"free-commutator-walk", worst_tilde <= 1e-12,
                          ordered_json{{"max_defect", worst_tilde}, {"tolerance", 1e-12}}});
  }

  // --- identification operator algebra, exact
  {
    double worst_glue = 0.0;
    double worst_proj = 0.0;
    double worst_conj = 0.0;
    for (int c = 0; c < cfg.checks; ++c) {
      const WalkState phi = random_local_state(cfg.seed * 4099 + static_cast<std::uint64_t>(c), 3);
      worst_glue = std::max(worst_glue, distance(apply_J(apply_J_star(phi)), phi));
      worst_conj = std::max(worst_conj, distance(apply_A_via_J(phi), apply_A_tilde(phi)));

      const TripleState Phi = random_local_triple(cfg.seed * 5231 + static_cast<std::uint64_t>(c), 3);
      const TripleState glued = apply_J_star(apply_J(Phi));
      TripleState masked;
      for (int k = 0; k < 3; ++k) masked.comp[static_cast<std::size_t>(k)] = mask_class(Phi.comp[static_cast<std::size_t>(k)], k + 1);
      worst_proj = std::max(worst_proj, distance(glued, masked));
    }
    res.sections["identification"] = ordered_json{{"samples", cfg.checks},
                                                  {"max_glue_defect", worst_glue},
                                                  {"max_projection_defect", worst_proj},
                                                  {"max_conjugate_defect", worst_conj}};
    res.checks.push_back({"glue-isometry", worst_glue == 0.0,
                          ordered_json{{"max_defect", worst_glue}, {"tolerance", 0.0}}});
    res.checks.push_back({"channel-projections", worst_proj == 0.0,
                          ordered_json{{"max_defect", worst_proj}, {"tolerance", 0.0}}});
    res.checks.push_back({"conjugate-via-glue", worst_conj == 0.0,
                          ordered_json{{"max_defect", worst_conj}, {"tolerance", 0.0}}});
  }

  // --- V factorization and the Hilbert-Schmidt closed form
  {
    double worst = 0.0;
    for (int c = 0; c < cfg.checks; ++c) {
      const TripleState Phi = random_local_triple(cfg.seed * 6673 + static_cast<std::uint64_t>(c), 2);
      const WalkState direct = apply_V(coin, Phi, lim);
      const WalkState factored = apply_G_star(coin, apply_G0(coin, Phi), lim);
      worst = std::max(worst, distance(direct, factored) / Phi.norm());
    }
    res.checks.push_back({"v-factorization", worst <= 1e-12,
                          ordered_json{{"max_defect", worst}, {"tolerance", 1e-12}}});
    res.sections["v_factorization"] = ordered_json{{"samples", cfg.checks}, {"max_defect", worst}};

    BallIndex ball;
    ball.build(cfg.hs_radius);
    ordered_json hs = ordered_json::array();
    double worst_hs = 0.0;
    for (int k = 1; k <= 3; ++k) {
      const double s = (1.0 + coin.eps(k)) / 2.0;
      double enumerated = 0.0;
      for (std::size_t i = 0; i < ball.size(); ++i) {
        enumerated += 3.0 * std::pow(japanese_bracket(ball.word(i).norm()), -2.0 * s);
      }
      double closed = 3.0;  // the root site
      for (int m = 1; m <= cfg.hs_radius; ++m) {
        closed += 3.0 * static_cast<double>(sphere_size(m)) *
                  std::pow(japanese_bracket(m), -2.0 * s);
      }
      const double diff = std::abs(enumerated - closed);
      worst_hs = std::max(worst_hs, diff);
      hs.push_back(ordered_json{{"s", s},
                                {"enumerated", enumerated},
                                {"closed_form", closed},
                                {"difference", diff}});
    }
    res.sections["hilbert_schmidt"] = ordered_json{{"radius", cfg.hs_radius}, {"sums", hs}};
    res.checks.push_back({"hs-closed-form", worst_hs <= 1e-10,
                          ordered_json{{"max_difference", worst_hs}, {"tolerance", 1e-10}}});
  }

  // --- conjugate weight growth stays inside the linear envelope
  {
    const int radius = std::min(cfg.radius, 10);
    BallIndex ball;
    ball.build(radius);
    bool ok = true;
    std::int64_t worst_excess = std::numeric_limits<std::int64_t>::min();
    for (std::size_t idx = 0; idx < ball.size(); ++idx) {
      const TreeWord& x = ball.word(idx);
      const std::int64_t envelope = 2 * static_cast<std::int64_t>(x.norm()) + 1;
      for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
          if (i == j) continue;
          const std::int64_t w = a_weight(x, i, j);
          const std::int64_t excess = std::llabs(w) - envelope;
          worst_excess = std::max(worst_excess, excess);
          if (excess > 0) ok = false;
        }
      }
    }
    res.sections["weight_bound"] = ordered_json{{"radius", radius},
                                                {"max_excess", worst_excess}};
    res.checks.push_back({"weight-growth", ok,
                          ordered_json{{"radius", radius}, {"max_excess", worst_excess}}});
  }

  // --- informational: commutator defect of the interacting walk on shells
  {
    const auto u_fwd = fn<WalkState>([&](const WalkState& s) { return apply_U(coin, s, lim); });
    const auto u_bwd = fn<WalkState>([&](const WalkState& s) { return apply_U_inv(coin, s, lim); });
    const auto at = fn<WalkState>([](const WalkState& s) { return apply_A_tilde(s); });
    ordered_json decay = ordered_json::array();
    for (int r : {2, 4, 8}) {
      double worst = 0.0;
      for (std::uint64_t s = 0; s < 2; ++s) {
        const WalkState phi = random_shell_state(cfg.seed * 11 + s, r);
        WalkState d = commutator_form<WalkState>(u_fwd, u_bwd, at, phi);
        d.add_scaled(phi, Complex(-2.0, 0.0));
        worst = std::max(worst, d.norm());
      }
      decay.push_back(ordered_json{{"shell", r}, {"max_defect", worst}});
    }
    res.sections["walk_commutator_decay"] = decay;
  }

  return res;
}

// ============================================================================
// spectrum
// ============================================================================

ExperimentResult run_spectrum(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const CoinField coin(cfg.coin);
  const EvolutionLimits& lim = cfg.limits;
  const bool pure = coin.is_pure();
  const double two_pi = 2.0 * std::numbers::pi;

  // --- free-dynamics moments from a single-channel basis probe
  {
    TripleState probe;
    probe.comp[0] = WalkState::basis(TreeWord{}, 0);
    const MomentSequence seq = moments(free_dynamics(coin, lim), probe, cfg.degree);
    double max_abs = 0.0;
    for (int n = 1; n <= seq.degree; ++n) max_abs = std::max(max_abs, std::abs(seq.at(n)));
    res.sections["free_moments"] = ordered_json{{"degree", seq.degree},
                                                {"exact_arithmetic", seq.exact},
                                                {"max_abs_nonzero_order", max_abs}};
    res.checks.push_back({"free-moments-vanish", max_abs == 0.0 && seq.exact,
                          ordered_json{{"max_abs", max_abs}, {"tolerance", 0.0}}});
  }

  // --- per-probe moments, spectral density and locally-smooth partial sums
  const std::vector<ProbeSpec> probes = effective_probes(cfg);
  struct ProbeOutput {
    ordered_json section;
    std::vector<CheckResult> checks;
    std::vector<CsvArtifact> tables;
  };
  std::vector<ProbeOutput> outputs(probes.size());
  const bool walk_smooth_feasible = pure || cfg.coin.preset == CoinPreset::kFiniteDefect ||
                                    cfg.drop_tolerance > 0.0 || cfg.smooth_n_max <= 18;

  std::vector<std::function<void()>> jobs;
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    jobs.push_back([&, pi] {
      const CoinField local_coin(cfg.coin);
      const ProbeSpec& spec = probes[pi];
      ProbeOutput& out = outputs[pi];
      const std::string label = spec.label();

      WalkState phi = spec.resolve(local_coin, lim);
      phi.set_drop_tolerance(cfg.drop_tolerance);
      const Dynamics<WalkState> dyn = walk_dynamics(local_coin, lim);

      const MomentSequence seq = moments(dyn, phi, cfg.degree);
      const std::vector<double> density = density_estimate(seq, cfg.grid, cfg.kernel);
      double dmin = density[0], dmax = density[0], dmean = 0.0;
      for (double v : density) {
        dmin = std::min(dmin, v);
        dmax = std::max(dmax, v);
        dmean += v;
      }
      dmean /= static_cast<double>(density.size());

      CsvArtifact table;
      table.filename = "density-" + label + ".csv";
      table.header = {"angle", "density"};
      for (int t = 0; t < cfg.grid; ++t) {
        table.rows.push_back(csv_row({two_pi * t / cfg.grid, density[static_cast<std::size_t>(t)]}));
      }
      out.tables.push_back(std::move(table));

      ordered_json sec;
      sec["probe"] = label;
      sec["moment_c0"] = seq.at(0).real();
      double max_abs = 0.0;
      for (int n = 1; n <= seq.degree; ++n) max_abs = std::max(max_abs, std::abs(seq.at(n)));
      sec["max_abs_nonzero_order"] = max_abs;
      sec["exact_arithmetic"] = seq.exact;
      sec["density"] = ordered_json{{"min", dmin}, {"max", dmax}, {"mean", dmean}};

      out.checks.push_back({"moment-normalization-" + label,
                            std::abs(seq.at(0).real() - 1.0) <= 1e-12,
                            ordered_json{{"c0", seq.at(0).real()}}});
      out.checks.push_back({"density-nonnegative-" + label, dmin >= -1e-12,
                            ordered_json{{"min", dmin}}});
      const bool basis_probe = std::holds_alternative<ProbeSpec::Basis>(spec.kind) && spec.evolve == 0;
      if (pure && basis_probe) {
        out.checks.push_back({"pure-moments-vanish-" + label, max_abs == 0.0,
                              ordered_json{{"max_abs", max_abs}}});
        const double flat = std::max(std::abs(dmax * two_pi - 1.0), std::abs(dmin * two_pi - 1.0));
        out.checks.push_back({"pure-density-flat-" + label, flat <= 1e-12,
                              ordered_json{{"max_deviation", flat}}});
      } else if (!pure) {
        const double floor = 0.01 / two_pi;
        out.checks.push_back({"density-floor-" + label, dmin >= floor,
                              ordered_json{{"min", dmin}, {"floor", floor}}});
      }

      // locally-smooth partial sums, free dynamics first
      {
        WalkState base = spec.resolve(local_coin, lim);
        const SmoothSumSeries free_series = smooth_sum_diagnostic(
            free_dynamics(local_coin, lim), TripleState::diagonal(base), cfg.smooth_s,
            cfg.smooth_n_max);
        CsvArtifact st;
        st.filename = "smooth-sums-free-" + label + ".csv";
        st.header = {"n", "increment", "partial_sum"};
        for (std::size_t m = 0; m < free_series.increments.size(); ++m) {
          st.rows.push_back({std::to_string(m), format_double(free_series.increments[m]),
                             format_double(free_series.partial_sums[m])});
        }
        out.tables.push_back(std::move(st));
        const double first = free_series.increments.front();
        const double last = free_series.increments.back();
        const bool flattening = first == 0.0 ? last == 0.0 : last < 1e-3 * first;
        sec["smooth_free"] = ordered_json{{"s", cfg.smooth_s},
                                          {"first_increment", first},
                                          {"last_increment", last},
                                          {"total", free_series.partial_sums.back()}};
        out.checks.push_back({"smooth-flattening-free-" + label, flattening,
                              ordered_json{{"first", first}, {"last", last}}});
      }
      if (walk_smooth_feasible) {
        const SmoothSumSeries walk_series =
            smooth_sum_diagnostic(dyn, phi, cfg.smooth_s, cfg.smooth_n_max);
        CsvArtifact st;
        st.filename = "smooth-sums-walk-" + label + ".csv";
        st.header = {"n", "increment", "partial_sum"};
        for (std::size_t m = 0; m < walk_series.increments.size(); ++m) {
          st.rows.push_back({std::to_string(m), format_double(walk_series.increments[m]),
                             format_double(walk_series.partial_sums[m])});
        }
        out.tables.push_back(std::move(st));
        const double first = walk_series.increments.front();
        const double last = walk_series.increments.back();
        const bool flattening = first == 0.0 ? last == 0.0 : last < 1e-3 * first;
        sec["smooth_walk"] = ordered_json{{"s", cfg.smooth_s},
                                          {"first_increment", first},
                                          {"last_increment", last},
                                          {"total", walk_series.partial_sums.back()}};
        out.checks.push_back({"smooth-flattening-walk-" + label, flattening,
                              ordered_json{{"first", first}, {"last", last}}});
      } else {
        sec["smooth_walk"] = ordered_json{
            {"skipped", "support growth requires drop_tolerance > 0 for this preset"}};
      }
      out.section = std::move(sec);
    });
  }
  run_jobs(cfg.threads, jobs);

  ordered_json probe_sections = ordered_json::array();
  for (auto& out : outputs) {
    probe_sections.push_back(std::move(out.section));
    for (auto& c : out.checks) res.checks.push_back(std::move(c));
    for (auto& t : out.tables) res.tables.push_back(std::move(t));
  }
  res.sections["probes"] = std::move(probe_sections);

  // --- arc filter quality on the configured windows
  {
    ordered_json filters = ordered_json::array();
    for (const auto& w : effective_windows(cfg)) {
      const ArcFilter filter = ArcFilter::build(w, cfg.filter_degree);
      filters.push_back(ordered_json{{"center", w.center},
                                     {"half_width", w.half_width},
                                     {"degree", filter.degree()},
                                     {"bias", filter.bias()}});
    }
    res.sections["filters"] = std::move(filters);
  }

  // --- truncated point-spectrum scan with cross-radius stability
  {
    ScanOptions opts = cfg.scan;
    const std::vector<ScanResult> scans = scan_with_stability(coin, cfg.scan_radii, opts);
    ordered_json scan_json = ordered_json::array();
    std::size_t total_candidates = 0;
    std::size_t stable_candidates = 0;
    for (const auto& s : scans) {
      ordered_json cands = ordered_json::array();
      for (const auto& c : s.candidates) {
        ++total_candidates;
        if (c.stable) ++stable_candidates;
        cands.push_back(ordered_json{{"phase", c.phase},
                                     {"modulus", c.modulus},
                                     {"boundary_weight", c.boundary_weight},
                                     {"stable", c.stable}});
      }
      scan_json.push_back(ordered_json{{"radius", s.radius},
                                       {"dimension", s.dimension},
                                       {"iterations", s.iterations},
                                       {"converged", s.converged},
                                       {"max_modulus", s.max_modulus},
                                       {"candidates", std::move(cands)}});
    }
    res.json_files.emplace_back("scan.json", scan_json);
    res.sections["point_scan"] = scan_json;
    if (pure) {
      res.checks.push_back({"scan-empty", total_candidates == 0,
                            ordered_json{{"candidates", total_candidates}}});
    } else {
      res.checks.push_back({"scan-stable-or-empty",
                            total_candidates == 0 || stable_candidates == total_candidates,
                            ordered_json{{"candidates", total_candidates},
                                         {"stable", stable_candidates}}});
    }
  }

  return res;
}

// ============================================================================
// mourre
// ============================================================================

ExperimentResult run_mourre(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const CoinField coin(cfg.coin);
  const EvolutionLimits& lim = cfg.limits;
  const std::vector<SpectralWindow> windows = effective_windows(cfg);

  CsvArtifact table;
  table.filename = "mourre-quotients.csv";
  table.header = {"section", "window_center", "window_half_width",
                  "probe",   "quotient",      "imag_part",
                  "filtered_norm", "skipped"};
  auto add_row = [&table](const std::string& section, const SpectralWindow& w,
                          const std::string& probe, const MourreSample& s) {
    table.rows.push_back({section, format_double(w.center), format_double(w.half_width), probe,
                          format_double(s.quotient), format_double(s.imag_part),
                          format_double(s.filtered_norm), s.skipped ? "1" : "0"});
  };

  std::vector<ArcFilter> filters;
  filters.reserve(windows.size());
  for (const auto& w : windows) filters.push_back(ArcFilter::build(w, cfg.filter_degree));

  // --- free dynamics: quotient is the exact scalar 2 on every window
  {
    const Dynamics<TripleState> dyn = free_dynamics(coin, lim);
    const auto a0 = fn<TripleState>([](const TripleState& t) { return apply_A0(t); });
    double worst = 0.0;
    int used = 0;
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      for (std::uint64_t p = 0; p < 10; ++p) {
        const TripleState probe = random_local_triple(cfg.seed * 977 + p, 2);
        const MourreSample s = mourre_rayleigh<TripleState>(dyn, a0, filters[wi], probe);
        add_row("free", windows[wi], "free-" + std::to_string(p), s);
        if (s.skipped) continue;
        ++used;
        worst = std::max(worst, std::abs(s.quotient - 2.0));
      }
    }
    res.sections["free"] = ordered_json{{"samples", used}, {"max_quotient_defect", worst}};
    res.checks.push_back({"free-quotients-exact", used > 0 && worst <= 1e-10,
                          ordered_json{{"samples", used}, {"max_defect", worst},
                                       {"tolerance", 1e-10}}});
  }

  // --- same statement for the class-coin free walk on the glued space
  {
    const Dynamics<WalkState> dyn = tilde_free_dynamics(coin, lim);
    const auto at = fn<WalkState>([](const WalkState& s) { return apply_A_tilde(s); });
    double worst = 0.0;
    int used = 0;
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      for (std::uint64_t p = 0; p < 10; ++p) {
        const WalkState probe = random_local_state(cfg.seed * 1409 + p, 2);
        const MourreSample s = mourre_rayleigh<WalkState>(dyn, at, filters[wi], probe);
        add_row("tilde", windows[wi], "tilde-" + std::to_string(p), s);
        if (s.skipped) continue;
        ++used;
        worst = std::max(worst, std::abs(s.quotient - 2.0));
      }
    }
    res.sections["tilde"] = ordered_json{{"samples", used}, {"max_quotient_defect", worst}};
    res.checks.push_back({"tilde-quotients-exact", used > 0 && worst <= 1e-10,
                          ordered_json{{"samples", used}, {"max_defect", worst},
                                       {"tolerance", 1e-10}}});
  }

  // --- interacting walk: positivity up to a shell-decaying defect
  {
    const std::vector<ProbeSpec> shells = effective_shell_probes(cfg);
    struct ShellOutput {
      int norm = 0;
      std::vector<MourreSample> samples;  // one per window
    };
    std::vector<ShellOutput> outputs(shells.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t si = 0; si < shells.size(); ++si) {
      jobs.push_back([&, si] {
        const CoinField local_coin(cfg.coin);
        const Dynamics<WalkState> dyn = walk_dynamics(local_coin, lim);
        const auto at = fn<WalkState>([](const WalkState& s) { return apply_A_tilde(s); });
        const WalkState probe = shells[si].resolve(local_coin, lim);
        outputs[si].norm = std::get<ProbeSpec::Shell>(shells[si].kind).norm;
        const std::vector<WalkState> filtered = apply_filter_bank(dyn, filters, probe);
        for (const WalkState& psi : filtered) {
          outputs[si].samples.push_back(mourre_rayleigh_filtered<WalkState>(dyn, at, psi));
        }
      });
    }
    run_jobs(cfg.threads, jobs);

    std::map<int, double> min_quotient;
    for (std::size_t si = 0; si < shells.size(); ++si) {
      const std::string label = shells[si].label();
      for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        const MourreSample& s = outputs[si].samples[wi];
        add_row("walk", windows[wi], label, s);
        if (s.skipped) continue;
        auto [it, inserted] = min_quotient.try_emplace(outputs[si].norm, s.quotient);
        if (!inserted) it->second = std::min(it->second, s.quotient);
      }
    }

    ordered_json per_shell = ordered_json::array();
    bool floor_ok = !min_quotient.empty();
    std::vector<double> defect_by_r;
    std::vector<int> norms;
    const double envelope_scale = 1.5;
    for (const auto& [r, q] : min_quotient) {
      const double defect = 2.0 - q;
      const double envelope = envelope_scale / static_cast<double>(r);
      if (defect > envelope) floor_ok = false;
      per_shell.push_back(ordered_json{{"shell", r},
                                       {"min_quotient", q},
                                       {"defect", defect},
                                       {"envelope", envelope}});
      norms.push_back(r);
      defect_by_r.push_back(defect);
    }
    res.sections["walk"] = ordered_json{{"shells", per_shell},
                                        {"envelope_scale", envelope_scale}};
    res.checks.push_back({"walk-quotient-floor", floor_ok,
                          ordered_json{{"envelope_scale", envelope_scale},
                                       {"shells", per_shell}}});

    // fit log(defect) against log(r); want decay at least r^{-0.8}
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < norms.size(); ++i) {
      if (defect_by_r[i] > 0.0) {
        xs.push_back(std::log(static_cast<double>(norms[i])));
        ys.push_back(std::log(defect_by_r[i]));
      }
    }
    std::optional<double> slope;
    if (xs.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
      }
      const double n = static_cast<double>(xs.size());
      const double denom = n * sxx - sx * sx;
      if (denom > 0) slope = (n * sxy - sx * sy) / denom;
    }
    ordered_json slope_json;
    if (slope) slope_json = *slope;
    res.sections["walk"]["defect_slope"] = slope_json;
    res.checks.push_back({"walk-defect-decay", !slope || *slope <= -0.8,
                          ordered_json{{"slope", slope_json}, {"threshold", -0.8}}});
  }

  // --- informational: tail norms of the compact commutator correction
  {
    ordered_json tails = ordered_json::array();
    for (int r : {4, 8, 16}) {
      PowerIterationOptions opts;
      opts.limits = lim;
      opts.seed = cfg.seed * 13 + static_cast<std::uint64_t>(r);
      tails.push_back(ordered_json{{"shell", r}, {"estimate", va0_tail_norm(coin, r, opts)}});
    }
    res.sections["compact_tail"] = std::move(tails);
  }

  res.tables.push_back(std::move(table));
  return res;
}

// ============================================================================
// wave
// ============================================================================

ExperimentResult run_wave(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const CoinField coin(cfg.coin);
  const EvolutionLimits& lim = cfg.limits;
  const std::vector<ProbeSpec> probes = effective_probes(cfg);

  struct StudyOutput {
    ordered_json section;
    CsvArtifact table;
    std::vector<CheckResult> checks;
  };
  std::vector<StudyOutput> outputs(probes.size() * cfg.modes.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
      jobs.push_back([&, pi, mi] {
        const CoinField local_coin(cfg.coin);
        const WaveMode mode = cfg.modes[mi];
        const std::string label = probes[pi].label();
        const std::string tag = std::string(to_string(mode)) + "-" + label;
        StudyOutput& out = outputs[pi * cfg.modes.size() + mi];

        WalkState probe = probes[pi].resolve(local_coin, lim);
        probe.set_drop_tolerance(cfg.drop_tolerance);
        const ConvergenceRecord rec = convergence_study(local_coin, mode, cfg.direction, probe,
                                                        cfg.n_max, cfg.thresholds, lim);

        out.table.filename = "convergence-" + tag + ".csv";
        out.table.header = {"n", "increment", "isometry_defect"};
        for (int n = 1; n <= rec.n_max; ++n) {
          out.table.rows.push_back({std::to_string(n),
                                    format_double(rec.increments[static_cast<std::size_t>(n - 1)]),
                                    format_double(rec.isometry_defects[static_cast<std::size_t>(n)])});
        }

        double max_isometry = 0.0;
        for (double d : rec.isometry_defects) max_isometry = std::max(max_isometry, d);
        ordered_json sec;
        sec["mode"] = to_string(mode);
        sec["probe"] = label;
        sec["direction"] = cfg.direction == TimeDirection::kForward ? "forward" : "backward";
        sec["n_max"] = rec.n_max;
        if (rec.slope) {
          sec["slope"] = *rec.slope;
        } else {
          sec["slope"] = nullptr;
        }
        sec["tail_sum"] = rec.tail_sum;
        sec["tail_exactly_zero"] = rec.tail_exactly_zero;
        sec["max_isometry_defect"] = max_isometry;
        sec["converged"] = rec.converged;
        sec["thresholds"] = thresholds_json(rec.thresholds);
        out.section = std::move(sec);

        out.checks.push_back({"convergence-" + tag, rec.converged,
                              ordered_json{{"tail_sum", rec.tail_sum},
                                           {"tail_exactly_zero", rec.tail_exactly_zero}}});
        // Shift and tilde iterates are built from norm-preserving factors, so
        // their defects must vanish at machine precision. Triple-mode iterates
        // pass through the glue map, which contracts inputs that have not yet
        // separated into their channels; those defects are reported raw rather
        // than checked because the initial subspace may be a proper subspace.
        if (mode != WaveMode::kTriple) {
          out.checks.push_back({"isometry-" + tag, max_isometry <= 1e-12,
                                ordered_json{{"max_defect", max_isometry}, {"tolerance", 1e-12}}});
        }
      });
    }
  }
  run_jobs(cfg.threads, jobs);

  ordered_json studies = ordered_json::array();
  for (auto& out : outputs) {
    studies.push_back(std::move(out.section));
    res.tables.push_back(std::move(out.table));
    for (auto& c : out.checks) res.checks.push_back(std::move(c));
  }
  res.sections["convergence"] = std::move(studies);

  // --- finite-n adjoint duality across modes
  {
    const int n_top = std::min(cfg.n_max, 12);
    ordered_json duality = ordered_json::array();
    for (WaveMode mode : cfg.modes) {
      double worst = 0.0;
      for (int n = 1; n <= n_top; ++n) {
        const std::uint64_t tag = static_cast<std::uint64_t>(n);
        if (mode == WaveMode::kTriple) {
          const TripleState Phi = random_local_triple(cfg.seed * 2801 + tag, 2);
          const WalkState psi = random_local_state(cfg.seed * 3023 + tag, 2);
          const Complex lhs = inner_product(wave_iterate_triple(coin, cfg.direction, n, Phi, lim), psi);
          const Complex rhs = inner_product(Phi, wave_adjoint_triple(coin, cfg.direction, n, psi, lim));
          worst = std::max(worst, std::abs(lhs - rhs));
        } else {
          const WalkState phi = random_local_state(cfg.seed * 3121 + tag, 2);
          const WalkState psi = random_local_state(cfg.seed * 3329 + tag, 2);
          const WalkState iterate = mode == WaveMode::kShift
                                        ? wave_iterate_shift(coin, cfg.direction, n, phi, lim)
                                        : wave_iterate_tilde(coin, cfg.direction, n, phi, lim);
          const WalkState adjoint = mode == WaveMode::kShift
                                        ? wave_adjoint_shift(coin, cfg.direction, n, psi, lim)
                                        : wave_adjoint_tilde(coin, cfg.direction, n, psi, lim);
          const Complex lhs = inner_product(iterate, psi);
          const Complex rhs = inner_product(phi, adjoint);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
      duality.push_back(ordered_json{{"mode", to_string(mode)},
                                     {"n_max", n_top},
                                     {"max_error", worst}});
      res.checks.push_back({std::string("adjoint-duality-") + to_string(mode), worst <= 1e-12,
                            ordered_json{{"max_error", worst}, {"tolerance", 1e-12}}});
    }
    res.sections["adjoint_duality"] = std::move(duality);
  }

  // --- chain identity and reconstruction (completeness surrogate)
  {
    ordered_json chain = ordered_json::array();
    for (const auto& spec : probes) {
      const WalkState probe = spec.resolve(coin, lim);
      const ChainCheckSample sample = chain_and_completeness_check(coin, probe, cfg.n_max, lim);
      const std::string label = spec.label();
      chain.push_back(ordered_json{{"probe", label},
                                   {"n", cfg.n_max},
                                   {"glue_identity", sample.glue_identity},
                                   {"reconstruction", sample.reconstruction},
                                   {"chain_defect", sample.chain_defect}});
      const bool ok = sample.glue_identity == 0.0 && sample.reconstruction <= 1e-12 &&
                      sample.chain_defect <= 1e-12;
      res.checks.push_back({"chain-identities-" + label, ok,
                            ordered_json{{"glue_identity", sample.glue_identity},
                                         {"reconstruction", sample.reconstruction},
                                         {"chain_defect", sample.chain_defect},
                                         {"tolerance", 1e-12}}});
    }
    res.sections["chain"] = std::move(chain);
  }

  // --- informational: intertwining defects and channel mass balance
  {
    ordered_json inter = ordered_json::array();
    const int n = std::min(4, cfg.n_max);
    for (WaveMode mode : cfg.modes) {
      for (int m = 1; m <= 2; ++m) {
        const TripleState Phi = random_local_triple(cfg.seed * 4451 + static_cast<std::uint64_t>(m), 2);
        const double defect = intertwining_defect(coin, mode, cfg.direction, n, m, Phi, lim);
        inter.push_back(ordered_json{{"mode", to_string(mode)},
                                     {"n", n},
                                     {"monomial_power", m},
                                     {"defect", defect}});
      }
    }
    res.sections["intertwining"] = std::move(inter);

    ordered_json masses = ordered_json::array();
    for (const auto& spec : probes) {
      const WalkState probe = spec.resolve(coin, lim);
      const ChannelMassSeries series = channel_masses(coin, probe, cfg.n_max, lim);
      masses.push_back(ordered_json{{"probe", spec.label()},
                                    {"steps", cfg.n_max},
                                    {"cesaro_variation", series.cesaro_variation}});
    }
    res.sections["channel_masses"] = std::move(masses);
  }

  return res;
}

// ============================================================================
// full-report and dispatch
// ============================================================================

ExperimentResult run_full_report(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const std::pair<const char*, ExperimentResult (*)(const ExperimentConfig&)> parts[] = {
      {"identity_check", &run_identity_check},
      {"spectrum", &run_spectrum},
      {"mourre", &run_mourre},
      {"wave", &run_wave},
  };
  for (const auto& [name, fnptr] : parts) {
    ExperimentResult part = fnptr(cfg);
    for (auto& c : part.checks) {
      c.name = std::string(name) + ":" + c.name;
      res.checks.push_back(std::move(c));
    }
    res.sections[name] = std::move(part.sections);
    for (auto& t : part.tables) res.tables.push_back(std::move(t));
    for (auto& f : part.json_files) res.json_files.push_back(std::move(f));
  }
  return res;
}

ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& cfg) {
  switch (kind) {
    case ExperimentKind::kIdentityCheck: return run_identity_check(cfg);
    case ExperimentKind::kSpectrum: return run_spectrum(cfg);
    case ExperimentKind::kMourre: return run_mourre(cfg);
    case ExperimentKind::kWave: return run_wave(cfg);
    case ExperimentKind::kFullReport: return run_full_report(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

int run_experiment_to_directory(ExperimentKind kind, const std::string& config_path,
                                const std::filesystem::path& out_dir,
                                std::optional<int> threads,
                                std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (threads) cfg.threads = *threads;
  if (seed) cfg.seed = *seed;
  cfg.validate();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir.string());

  append_run_log(out_dir, std::string("start ") + to_string(kind));
  ExperimentResult result = run_experiment(kind, cfg);

  ordered_json report;
  report["experiment"] = to_string(kind);
  report["version"] = kLibraryVersion;
  report["passed"] = result.passed();
  report["checks"] = checks_json(result.checks);
  report["results"] = result.sections;
  report["config"] = resolved_config_json(cfg);
  write_json_file(out_dir / "report.json", report);
  for (const auto& t : result.tables) write_csv_file(out_dir / t.filename, t);
  for (const auto& [name, body] : result.json_files) write_json_file(out_dir / name, body);

  int failed = 0;
  for (const auto& c : result.checks) {
    if (!c.passed) ++failed;
    std::printf("[%s] %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str());
  }
  std::printf("%s: %zu/%zu checks passed; report at %s\n", to_string(kind),
              result.checks.size() - static_cast<std::size_t>(failed), result.checks.size(),
              (out_dir / "report.json").c_str());
  append_run_log(out_dir, result.passed() ? "done: all checks passed"
                                          : "done: " + std::to_string(failed) + " check(s) failed");
  return result.passed() ? 0 : 1;
}

}  // namespace treewalk
