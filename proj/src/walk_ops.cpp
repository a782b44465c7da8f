#include "treewalk/walk_ops.hpp"

#include <string>

namespace treewalk {

namespace {

void check_capacity(const WalkState& out, const EvolutionLimits& limits) {
  if (out.support_size() > limits.max_sites) {
    throw CapacityError("state support " + std::to_string(out.support_size()) +
                        " sites exceeds the configured limit");
  }
}

void check_radius(int norm, const EvolutionLimits& limits) {
  if (norm > limits.max_radius) {
    throw CapacityError("state support radius " + std::to_string(norm) +
                        " exceeds the configured limit " +
                        std::to_string(limits.max_radius));
  }
}

WalkState carry_meta(const WalkState& in) {
  WalkState out;
  out.set_drop_tolerance(in.drop_tolerance());
  out.add_pruned_mass(in.pruned_mass());
  return out;
}

/// Applies one transport step to every spin; `inverse` flips the flow.
WalkState transport_all(const WalkState& in, bool inverse,
                        const EvolutionLimits& limits) {
  WalkState out = carry_meta(in);
  out.amplitudes().reserve(in.support_size() * 2);
  for (const auto& [site, v] : in.amplitudes()) {
    for (int s = 0; s < 3; ++s) {
      if (v[s] == Complex(0.0, 0.0)) continue;
      const int i = kSpinPair[s][0];
      const int j = kSpinPair[s][1];
      const TreeWord target = inverse ? transport_inv(site, i, j) : transport(site, i, j);
      check_radius(target.norm(), limits);
      out.amplitudes()[target][s] = v[s];
    }
  }
  out.prune();
  check_capacity(out, limits);
  return out;
}

/// Single-block shift on all spins.
WalkState transport_pair(const WalkState& in, int i, int j, bool inverse,
                         const EvolutionLimits& limits) {
  WalkState out = carry_meta(in);
  out.amplitudes().reserve(in.support_size() * 2);
  for (const auto& [site, v] : in.amplitudes()) {
    const TreeWord target = inverse ? transport_inv(site, i, j) : transport(site, i, j);
    check_radius(target.norm(), limits);
    for (int s = 0; s < 3; ++s) {
      if (v[s] == Complex(0.0, 0.0)) continue;
      out.amplitudes()[target][s] = v[s];
    }
  }
  out.prune();
  check_capacity(out, limits);
  return out;
}

inline Vec3c mat_apply(const Matrix3cd& m, const Vec3c& v) {
  Vec3c r;
  for (int a = 0; a < 3; ++a) {
    r[a] = m(a, 0) * v[0] + m(a, 1) * v[1] + m(a, 2) * v[2];
  }
  return r;
}

WalkState coin_action(const CoinField& coin, const WalkState& in, bool adjoint) {
  WalkState out = carry_meta(in);
  out.amplitudes().reserve(in.support_size());
  for (const auto& [site, v] : in.amplitudes()) {
    const Matrix3cd& c = coin.matrix(site);
    const Vec3c w = adjoint ? mat_apply(c.adjoint(), v) : mat_apply(c, v);
    out.amplitudes()[site] = w;
  }
  out.prune();
  return out;
}

/// Constant diagonal coin: spin s picks up the phase exp(i phases[s]).
WalkState diagonal_phase(const WalkState& in, const std::array<double, 3>& phases,
                         bool adjoint) {
  WalkState out = in;
  std::array<Complex, 3> f;
  for (int s = 0; s < 3; ++s) {
    f[s] = std::polar(1.0, adjoint ? -phases[s] : phases[s]);
  }
  for (auto& [site, v] : out.amplitudes()) {
    for (int s = 0; s < 3; ++s) v[s] *= f[s];
  }
  return out;
}

/// Coin x -> C_{class(x)} (diagonal, site-class dependent).
WalkState class_phase(const CoinField& coin, const WalkState& in, bool adjoint) {
  WalkState out = in;
  std::array<std::array<Complex, 3>, 3> f;
  for (int k = 0; k < 3; ++k) {
    for (int s = 0; s < 3; ++s) {
      const double phase = coin.config().phases[k][s];
      f[k][s] = std::polar(1.0, adjoint ? -phase : phase);
    }
  }
  for (auto& [site, v] : out.amplitudes()) {
    const int k = site.chi_class() - 1;
    for (int s = 0; s < 3; ++s) v[s] *= f[k][s];
  }
  return out;
}

}  // namespace

WalkState apply_shift(const WalkState& s, int i, int j, const EvolutionLimits& limits) {
  return transport_pair(s, i, j, false, limits);
}

WalkState apply_shift_inv(const WalkState& s, int i, int j, const EvolutionLimits& limits) {
  return transport_pair(s, i, j, true, limits);
}

WalkState apply_S(const WalkState& s, const EvolutionLimits& limits) {
  return transport_all(s, false, limits);
}

WalkState apply_S_inv(const WalkState& s, const EvolutionLimits& limits) {
  return transport_all(s, true, limits);
}

WalkState apply_coin(const CoinField& coin, const WalkState& s) {
  return coin_action(coin, s, false);
}

WalkState apply_coin_adjoint(const CoinField& coin, const WalkState& s) {
  return coin_action(coin, s, true);
}

WalkState apply_U(const CoinField& coin, const WalkState& s, const EvolutionLimits& limits) {
  return apply_S(apply_coin(coin, s), limits);
}

WalkState apply_U_inv(const CoinField& coin, const WalkState& s, const EvolutionLimits& limits) {
  return apply_coin_adjoint(coin, apply_S_inv(s, limits));
}

TripleState apply_U0(const CoinField& coin, const TripleState& t, const EvolutionLimits& limits) {
  TripleState out;
  for (int k = 0; k < 3; ++k) {
    out.comp[k] =
        apply_S(diagonal_phase(t.comp[k], coin.config().phases[k], false), limits);
  }
  return out;
}

TripleState apply_U0_inv(const CoinField& coin, const TripleState& t,
                         const EvolutionLimits& limits) {
  TripleState out;
  for (int k = 0; k < 3; ++k) {
    out.comp[k] =
        diagonal_phase(apply_S_inv(t.comp[k], limits), coin.config().phases[k], true);
  }
  return out;
}

WalkState apply_U_tilde0(const CoinField& coin, const WalkState& s,
                         const EvolutionLimits& limits) {
  return apply_S(class_phase(coin, s, false), limits);
}

WalkState apply_U_tilde0_inv(const CoinField& coin, const WalkState& s,
                             const EvolutionLimits& limits) {
  return class_phase(coin, apply_S_inv(s, limits), true);
}

WalkState mask_class(const WalkState& s, int k) {
  WalkState out;
  out.set_drop_tolerance(s.drop_tolerance());
  for (const auto& [site, v] : s.amplitudes()) {
    if (site.chi_class() == k) out.amplitudes()[site] = v;
  }
  out.prune();
  return out;
}

WalkState apply_J(const TripleState& t) {
  WalkState out;
  out.set_drop_tolerance(t.comp[0].drop_tolerance());
  for (int k = 0; k < 3; ++k) {
    for (const auto& [site, v] : t.comp[k].amplitudes()) {
      if (site.chi_class() == k + 1) out.amplitudes()[site] = v;
    }
  }
  out.prune();
  return out;
}

TripleState apply_J_star(const WalkState& s) {
  TripleState out;
  for (int k = 0; k < 3; ++k) out.comp[k] = mask_class(s, k + 1);
  return out;
}

WalkState weight_multiply(const WalkState& s,
                          const std::function<double(const TreeWord&)>& fn) {
  WalkState out = s;
  for (auto& [site, v] : out.amplitudes()) {
    const double w = fn(site);
    for (int spin = 0; spin < 3; ++spin) v[spin] *= w;
  }
  out.prune();
  return out;
}

WalkState apply_V(const CoinField& coin, const TripleState& t, const EvolutionLimits& limits) {
  WalkState out = apply_J(apply_U0(coin, t, limits));
  out.add_scaled(apply_U(coin, apply_J(t), limits), Complex(-1.0, 0.0));
  out.prune();
  return out;
}

TripleState apply_V_adjoint(const CoinField& coin, const WalkState& s,
                            const EvolutionLimits& limits) {
  TripleState out = apply_U0_inv(coin, apply_J_star(s), limits);
  out.add_scaled(apply_J_star(apply_U_inv(coin, s, limits)), Complex(-1.0, 0.0));
  out.prune();
  return out;
}

TripleState apply_G0(const CoinField& coin, const TripleState& t) {
  TripleState out;
  for (int k = 0; k < 3; ++k) {
    const double power = -(1.0 + coin.eps(k + 1)) / 2.0;
    out.comp[k] = weight_multiply(t.comp[k], [power](const TreeWord& x) {
      return std::pow(japanese_bracket(x), power);
    });
  }
  return out;
}

WalkState apply_G_star(const CoinField& coin, const TripleState& t,
                       const EvolutionLimits& limits) {
  // D Phi = sum_k [ S (C_k - C) chi_k + (chi_k S - S chi_k) C_k ] <.>^{1+eps_k} phi_k,
  // applied after another half weight G0.
  const TripleState half = apply_G0(coin, t);
  WalkState out;
  for (int k = 0; k < 3; ++k) {
    const double power = 1.0 + coin.eps(k + 1);
    const WalkState full = weight_multiply(half.comp[k], [power](const TreeWord& x) {
      return std::pow(japanese_bracket(x), power);
    });

    // S (C_k - C) chi_k
    const WalkState masked = mask_class(full, k + 1);
    WalkState coin_diff = diagonal_phase(masked, coin.config().phases[k], false);
    coin_diff.add_scaled(apply_coin(coin, masked), Complex(-1.0, 0.0));
    coin_diff.prune();
    out.add_scaled(apply_S(coin_diff, limits), Complex(1.0, 0.0));

    // [chi_k, S] C_k
    const WalkState phased = diagonal_phase(full, coin.config().phases[k], false);
    const WalkState shifted = apply_S(phased, limits);
    out.add_scaled(mask_class(shifted, k + 1), Complex(1.0, 0.0));
    out.add_scaled(apply_S(mask_class(phased, k + 1), limits), Complex(-1.0, 0.0));
  }
  out.prune();
  return out;
}

}  // namespace treewalk
