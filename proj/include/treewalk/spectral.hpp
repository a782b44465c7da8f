#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "treewalk/coin.hpp"
#include "treewalk/state.hpp"
#include "treewalk/walk_ops.hpp"

namespace treewalk {

/// Unitary dynamics presented as a pair of step maps.
template <class State>
struct Dynamics {
  std::function<State(const State&)> forward;
  std::function<State(const State&)> backward;
};

Dynamics<WalkState> walk_dynamics(const CoinField& coin, const EvolutionLimits& limits = {});
Dynamics<WalkState> tilde_free_dynamics(const CoinField& coin,
                                        const EvolutionLimits& limits = {});
Dynamics<TripleState> free_dynamics(const CoinField& coin,
                                    const EvolutionLimits& limits = {});

/// Arc of the circle: phases within half_width of center, radians.
struct SpectralWindow {
  double center = 0.0;
  double half_width = 0.5;
  void validate() const;
};

/// Smooth arc mollifier eta: equal to 1 on the inner half of the window,
/// 0 outside it, represented by a trigonometric polynomial of the given
/// degree.  filter_bias is the max deviation of the truncation from the
/// ideal profile over a fine grid.
class ArcFilter {
public:
  static ArcFilter build(const SpectralWindow& window, int degree, int grid = 8192);

  const SpectralWindow& window() const { return window_; }
  int degree() const { return degree_; }
  double bias() const { return bias_; }

  /// Coefficient of z^n, |n| <= degree.
  Complex coefficient(int n) const { return coeff_[static_cast<std::size_t>(n + degree_)]; }

  double ideal(double theta) const;
  double truncated(double theta) const;

  /// sum_n coeff(n) U^n phi.
  template <class State>
  State apply(const Dynamics<State>& dyn, const State& phi) const {
    State acc = phi;
    acc.scale(coefficient(0));
    State fwd = phi;
    State bwd = phi;
    for (int n = 1; n <= degree_; ++n) {
      fwd = dyn.forward(fwd);
      bwd = dyn.backward(bwd);
      acc.add_scaled(fwd, coefficient(n));
      acc.add_scaled(bwd, coefficient(-n));
    }
    acc.prune();
    return acc;
  }

private:
  SpectralWindow window_;
  int degree_ = 0;
  double bias_ = 0.0;
  std::vector<Complex> coeff_;
};

/// Autocorrelations c_n = <phi, U^n phi>, n = -degree..degree, computed by
/// splitting the power between forward and backward evolution so support
/// growth is halved.  `exact` records that no drop tolerance was active.
struct MomentSequence {
  int degree = 0;
  std::vector<Complex> nonneg;  // c_0 .. c_degree
  bool exact = true;

  Complex at(int n) const {
    return n >= 0 ? nonneg[static_cast<std::size_t>(n)]
                  : std::conj(nonneg[static_cast<std::size_t>(-n)]);
  }
};

template <class State>
MomentSequence moments(const Dynamics<State>& dyn, const State& phi, int degree) {
  MomentSequence seq;
  seq.degree = degree;
  seq.nonneg.resize(static_cast<std::size_t>(degree) + 1);
  seq.nonneg[0] = Complex(phi.squared_norm(), 0.0);
  State fwd = phi;
  State bwd = phi;
  for (int n = 1; n <= degree; ++n) {
    if (n % 2 == 1) {
      fwd = dyn.forward(fwd);
    } else {
      bwd = dyn.backward(bwd);
    }
    // c_n = <U^{-b} phi, U^{f} phi> with f + b = n.
    seq.nonneg[static_cast<std::size_t>(n)] = inner_product(bwd, fwd);
  }
  seq.exact = phi.drop_tolerance() == 0.0;
  return seq;
}

enum class SmoothingKernel { kFejer, kJackson };

SmoothingKernel kernel_from_string(const std::string& name);
const char* to_string(SmoothingKernel k);

/// Damping coefficients k_0..k_degree for the positive smoothing kernels.
std::vector<double> kernel_coefficients(SmoothingKernel kernel, int degree);

/// Kernel-smoothed spectral density on a uniform phase grid:
///   d(theta_t) = (1/2pi) sum_n k_|n| c_n e^{-in theta_t},
/// with theta_t = 2 pi t / grid.  Real by construction.
std::vector<double> density_estimate(const MomentSequence& seq, int grid,
                                     SmoothingKernel kernel);

/// Filtered states for a whole bank of filters from one shared power sweep
/// of the dynamics.  Equivalent to calling apply() per filter, but the
/// expensive evolution of the probe is done once.
template <class State>
std::vector<State> apply_filter_bank(const Dynamics<State>& dyn,
                                     const std::vector<ArcFilter>& filters,
                                     const State& phi) {
  int max_degree = 0;
  for (const ArcFilter& f : filters) max_degree = std::max(max_degree, f.degree());
  std::vector<State> out;
  out.reserve(filters.size());
  for (const ArcFilter& f : filters) {
    State acc = phi;
    acc.scale(f.coefficient(0));
    out.push_back(std::move(acc));
  }
  State fwd = phi;
  State bwd = phi;
  for (int n = 1; n <= max_degree; ++n) {
    fwd = dyn.forward(fwd);
    bwd = dyn.backward(bwd);
    for (std::size_t i = 0; i < filters.size(); ++i) {
      if (n > filters[i].degree()) continue;
      out[i].add_scaled(fwd, filters[i].coefficient(n));
      out[i].add_scaled(bwd, filters[i].coefficient(-n));
    }
  }
  for (State& s : out) s.prune();
  return out;
}

/// Rayleigh quotient of the commutator identity on a filtered probe.
struct MourreSample {
  double quotient = 0.0;       // Re <psi, U^-1[A,U] psi> / ||psi||^2
  double imag_part = 0.0;      // Im of the same form (sanity, ~0)
  double filtered_norm = 0.0;  // ||eta(U) phi||
  bool skipped = false;        // filtered probe below the degeneracy floor
};

/// Quotient on an already filtered state.
template <class State>
MourreSample mourre_rayleigh_filtered(const Dynamics<State>& dyn,
                                      const std::function<State(const State&)>& conjugate_op,
                                      const State& psi, double floor = 1e-8) {
  MourreSample sample;
  sample.filtered_norm = psi.norm();
  if (sample.filtered_norm < floor) {
    sample.skipped = true;
    return sample;
  }
  State form = dyn.backward(conjugate_op(dyn.forward(psi)));
  form.add_scaled(conjugate_op(psi), Complex(-1.0, 0.0));
  const Complex q = inner_product(psi, form);
  const double n2 = sample.filtered_norm * sample.filtered_norm;
  sample.quotient = q.real() / n2;
  sample.imag_part = q.imag() / n2;
  return sample;
}

template <class State>
MourreSample mourre_rayleigh(const Dynamics<State>& dyn,
                             const std::function<State(const State&)>& conjugate_op,
                             const ArcFilter& filter, const State& probe,
                             double floor = 1e-8) {
  return mourre_rayleigh_filtered(dyn, conjugate_op, filter.apply(dyn, probe), floor);
}

/// Partial sums sum_{|n|<=m} ||<.>^{-s} U^n psi||^2 for m = 0..n_max.
struct SmoothSumSeries {
  double s = 1.0;
  std::vector<double> increments;    // index m: term added at step m
  std::vector<double> partial_sums;  // running totals
};

template <class State>
State bracket_weight_multiply(const State& state, double power);

template <>
inline WalkState bracket_weight_multiply<WalkState>(const WalkState& state, double power) {
  return weight_multiply(state,
                         [power](const TreeWord& x) { return std::pow(japanese_bracket(x), power); });
}

template <>
inline TripleState bracket_weight_multiply<TripleState>(const TripleState& state,
                                                        double power) {
  TripleState out;
  for (int k = 0; k < 3; ++k) {
    out.comp[k] = bracket_weight_multiply<WalkState>(state.comp[k], power);
  }
  return out;
}

template <class State>
SmoothSumSeries smooth_sum_diagnostic(const Dynamics<State>& dyn, const State& psi,
                                      double s, int n_max) {
  SmoothSumSeries series;
  series.s = s;
  series.increments.reserve(static_cast<std::size_t>(n_max) + 1);
  series.partial_sums.reserve(static_cast<std::size_t>(n_max) + 1);

  double total = bracket_weight_multiply<State>(psi, -s).squared_norm();
  series.increments.push_back(total);
  series.partial_sums.push_back(total);

  State fwd = psi;
  State bwd = psi;
  for (int m = 1; m <= n_max; ++m) {
    fwd = dyn.forward(fwd);
    bwd = dyn.backward(bwd);
    const double inc = bracket_weight_multiply<State>(fwd, -s).squared_norm() +
                       bracket_weight_multiply<State>(bwd, -s).squared_norm();
    total += inc;
    series.increments.push_back(inc);
    series.partial_sums.push_back(total);
  }
  return series;
}

/// Least-squares slope of log(y) against log(n) over n in [first, last],
/// skipping nonpositive values; empty when fewer than two points survive.
std::optional<double> log_log_slope(const std::vector<double>& y, int first, int last);

}  // namespace treewalk
