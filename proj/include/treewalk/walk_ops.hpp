#pragma once

#include <functional>

#include "treewalk/coin.hpp"
#include "treewalk/state.hpp"

namespace treewalk {

/// Spin-block shift pairs: spin s moves under S_{ij} with (i,j) = kSpinPair[s].
inline constexpr int kSpinPair[3][2] = {{2, 3}, {3, 1}, {1, 2}};

/// One step of the S_{ij} flow: where the amplitude at y lands.
/// (S_{ij} f)(x) = f(x a_i) for even x and f(x a_j) for odd x, so amplitude
/// moves y -> y a_j (even y) and y -> y a_i (odd y).
inline TreeWord transport(const TreeWord& y, int i, int j) {
  return y.translated(y.even() ? j : i);
}

/// One step of the inverse flow S_{ij}^{-1} = S_{ji}.
inline TreeWord transport_inv(const TreeWord& y, int i, int j) {
  return y.translated(y.even() ? i : j);
}

/// S_{ij} applied to every spin component (the scalar shift tensored with
/// the identity on spins).
WalkState apply_shift(const WalkState& s, int i, int j,
                      const EvolutionLimits& limits = {});
WalkState apply_shift_inv(const WalkState& s, int i, int j,
                          const EvolutionLimits& limits = {});

/// Block shift S = diag(S_23, S_31, S_12).
WalkState apply_S(const WalkState& s, const EvolutionLimits& limits = {});
WalkState apply_S_inv(const WalkState& s, const EvolutionLimits& limits = {});

/// Pointwise coin action f(x) -> C(x) f(x) (and its adjoint).
WalkState apply_coin(const CoinField& coin, const WalkState& s);
WalkState apply_coin_adjoint(const CoinField& coin, const WalkState& s);

/// Full walk U = S C and its inverse U^{-1} = C* S^{-1}.
WalkState apply_U(const CoinField& coin, const WalkState& s,
                  const EvolutionLimits& limits = {});
WalkState apply_U_inv(const CoinField& coin, const WalkState& s,
                      const EvolutionLimits& limits = {});

/// Free reference walk on the triple space: component k evolves with the
/// constant diagonal coin C_k.
TripleState apply_U0(const CoinField& coin, const TripleState& t,
                     const EvolutionLimits& limits = {});
TripleState apply_U0_inv(const CoinField& coin, const TripleState& t,
                         const EvolutionLimits& limits = {});

/// Glued free walk on the walk space: coin C_{class(x)} at every site.
WalkState apply_U_tilde0(const CoinField& coin, const WalkState& s,
                         const EvolutionLimits& limits = {});
WalkState apply_U_tilde0_inv(const CoinField& coin, const WalkState& s,
                             const EvolutionLimits& limits = {});

/// Keeps only sites of the given partition class (1: branch 1 plus root,
/// 2/3: the respective branch).
WalkState mask_class(const WalkState& s, int k);

/// Identification J(phi_1,phi_2,phi_3) = sum_k chi_k phi_k and its adjoint.
WalkState apply_J(const TripleState& t);
TripleState apply_J_star(const WalkState& s);

/// Multiplies every site by fn(word) (spin-scalar weight).
WalkState weight_multiply(const WalkState& s, const std::function<double(const TreeWord&)>& fn);

/// Perturbation V = J U0 - U J and its adjoint.
WalkState apply_V(const CoinField& coin, const TripleState& t,
                  const EvolutionLimits& limits = {});
TripleState apply_V_adjoint(const CoinField& coin, const WalkState& s,
                            const EvolutionLimits& limits = {});

/// Half weight G0 = diag_k <.>^{-(1+eps_k)/2}.
TripleState apply_G0(const CoinField& coin, const TripleState& t);

/// Other factor G* = D G0, where D carries the coin difference and the
/// boundary commutator against the inverse full weight, so that
/// V = G* applied after G0.
WalkState apply_G_star(const CoinField& coin, const TripleState& t,
                       const EvolutionLimits& limits = {});

}  // namespace treewalk
