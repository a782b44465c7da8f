#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "treewalk/ball.hpp"
#include "treewalk/coin.hpp"
#include "treewalk/state.hpp"
#include "treewalk/walk_ops.hpp"

namespace treewalk {

/// Weight of the conjugate multiplication operator attached to the block
/// shift S_{ij}: with k the remaining index,
///     w_{ij}(x) = |x a_j|_k^2 - |x|_k^2   (x even)
///                 |x a_i|_k^2 - |x|_k^2   (x odd),
/// using the modified norm |.|_k.  Exact integer.
std::int64_t a_weight(const TreeWord& x, int i, int j);

/// Block-diagonal conjugate weight: spin s at site x is scaled by
/// a_weight(x, kSpinPair[s]).
WalkState apply_A_tilde(const WalkState& s);

/// The same operator routed through the identification, J A0 J*.
WalkState apply_A_via_J(const WalkState& s);

/// Conjugate operator of the free triple dynamics: A tilde per component.
TripleState apply_A0(const TripleState& t);

/// U^{-1) [A, U] phi = U^{-1} A U phi - A phi for caller-supplied ops.
template <class State>
State commutator_form(const std::function<State(const State&)>& forward,
                      const std::function<State(const State&)>& backward,
                      const std::function<State(const State&)>& conjugate_op,
                      const State& phi) {
  State out = backward(conjugate_op(forward(phi)));
  out.add_scaled(conjugate_op(phi), Complex(-1.0, 0.0));
  out.prune();
  return out;
}

struct SecondDifferenceFailure {
  TreeWord site;
  int i, j;
  std::int64_t value;
};

struct SecondDifferenceReport {
  int radius = 0;
  int pairs = 6;
  std::uint64_t checked = 0;
  std::vector<SecondDifferenceFailure> failures;
  bool ok() const { return failures.empty(); }
};

/// Exhaustively checks, over the ball of the given radius and all six
/// ordered pairs (i, j), that the discrete second difference of |.|_k^2
/// along the S_{ij} flow equals 2:
///   even x:  |x a_j a_i|_k^2 - 2 |x a_j|_k^2 + |x|_k^2 = 2
///   odd  x:  |x a_i a_j|_k^2 - 2 |x a_i|_k^2 + |x|_k^2 = 2
SecondDifferenceReport verify_second_difference(int radius,
                                                const BallConfig& config = {});

struct PowerIterationOptions {
  int iterations = 20;
  double tolerance = 1e-8;
  int probe_window = 4;
  std::uint64_t seed = 17;
  EvolutionLimits limits{};
};

/// Norm estimate of V A0 restricted to triple states supported at norm >= r,
/// by power iteration on the normal operator.  Returns 0 when the operator
/// annihilates the probe subspace (e.g. pure preset, r >= 2).
double va0_tail_norm(const CoinField& coin, int r,
                     const PowerIterationOptions& opts = {});

}  // namespace treewalk
