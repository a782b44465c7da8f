#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "treewalk/ball.hpp"
#include "treewalk/conjugate.hpp"
#include "treewalk/walk_ops.hpp"

using namespace treewalk;

namespace {

CoinConfig smooth_config() {
  CoinConfig cfg;
  cfg.preset = CoinPreset::kSmoothDecay;
  return cfg;
}

}  // namespace

TEST_CASE("conjugate weights at the root and its neighbours") {
  // w_{23}(e) = |a_3|_1^2 - |e|_1^2 = 1, since k = 6 - 2 - 3 = 1.
  CHECK(a_weight(TreeWord{}, 2, 3) == 1);
  // w_{23}(a_1) uses the odd branch: |a_1 a_2|_1^2 - |a_1|_1^2 = 1 - 0 = 1.
  CHECK(a_weight(TreeWord::parse("1"), 2, 3) == 1);
  CHECK(a_weight(TreeWord{}, 1, 2) == 1);
  CHECK(a_weight(TreeWord{}, 3, 1) == 1);
}

TEST_CASE("weights climb in odd steps along a shift orbit") {
  // along the S_23 orbit from the root the weight reads 1, 3, 5, ...
  TreeWord y;
  std::int64_t expected = 1;
  for (int step = 0; step < 8; ++step) {
    CHECK(a_weight(y, 2, 3) == expected);
    y = transport(y, 2, 3);
    expected += 2;
  }
}

TEST_CASE("transported weight always gains exactly two") {
  BallIndex ball;
  ball.build(8);
  for (std::size_t idx = 0; idx < ball.size(); ++idx) {
    const TreeWord& x = ball.word(idx);
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        if (i == j) continue;
        CHECK(a_weight(transport(x, i, j), i, j) - a_weight(x, i, j) == 2);
      }
    }
  }
}

TEST_CASE("second-difference verification covers the whole ball") {
  const SecondDifferenceReport report = verify_second_difference(9);
  CHECK(report.ok());
  CHECK(report.radius == 9);
  CHECK(report.checked == static_cast<std::uint64_t>(ball_size(9)) * 6);
  CHECK(report.failures.empty());
}

TEST_CASE("weights stay inside the linear envelope") {
  BallIndex ball;
  ball.build(8);
  for (std::size_t idx = 0; idx < ball.size(); ++idx) {
    const TreeWord& x = ball.word(idx);
    const std::int64_t envelope = 2 * static_cast<std::int64_t>(x.norm()) + 1;
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        if (i == j) continue;
        CHECK(std::llabs(a_weight(x, i, j)) <= envelope);
      }
    }
  }
}

TEST_CASE("conjugate multiplication acts diagonally with the pair weights") {
  const TreeWord x = TreeWord::parse("213");
  for (int spin = 0; spin < 3; ++spin) {
    const WalkState out = apply_A_tilde(WalkState::basis(x, spin));
    const double w = static_cast<double>(
        a_weight(x, kSpinPair[spin][0], kSpinPair[spin][1]));
    if (w == 0.0) {
      CHECK(out.empty());
    } else {
      REQUIRE(out.support_size() == 1);
      CHECK(out.at(x)[static_cast<std::size_t>(spin)] == Complex(w, 0.0));
    }
  }
}

TEST_CASE("conjugate operator is symmetric") {
  const WalkState phi = random_local_state(71, 3);
  const WalkState psi = random_local_state(72, 3);
  const Complex lhs = inner_product(apply_A_tilde(phi), psi);
  const Complex rhs = inner_product(phi, apply_A_tilde(psi));
  CHECK(std::abs(lhs - rhs) <= 1e-12);
}

TEST_CASE("glued conjugate equals the direct one bit-exactly") {
  for (std::uint64_t seed = 80; seed < 90; ++seed) {
    const WalkState phi = random_local_state(seed, 4);
    CHECK(distance(apply_A_via_J(phi), apply_A_tilde(phi)) == 0.0);
  }
}

TEST_CASE("channel conjugate matches the glued conjugate through J") {
  const TripleState Phi = random_local_triple(91, 3);
  // J A0 Phi agrees with the multiplication operator applied after gluing.
  const WalkState lhs = apply_J(apply_A0(Phi));
  const WalkState rhs = apply_A_tilde(apply_J(Phi));
  CHECK(distance(lhs, rhs) == 0.0);
}

TEST_CASE("free commutator scalars are exact") {
  const CoinField coin(smooth_config());
  const auto u0_fwd = std::function<TripleState(const TripleState&)>(
      [&](const TripleState& t) { return apply_U0(coin, t); });
  const auto u0_bwd = std::function<TripleState(const TripleState&)>(
      [&](const TripleState& t) { return apply_U0_inv(coin, t); });
  const auto a0 = std::function<TripleState(const TripleState&)>(
      [](const TripleState& t) { return apply_A0(t); });
  const auto ut_fwd = std::function<WalkState(const WalkState&)>(
      [&](const WalkState& s) { return apply_U_tilde0(coin, s); });
  const auto ut_bwd = std::function<WalkState(const WalkState&)>(
      [&](const WalkState& s) { return apply_U_tilde0_inv(coin, s); });
  const auto at = std::function<WalkState(const WalkState&)>(
      [](const WalkState& s) { return apply_A_tilde(s); });

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TripleState lhs = commutator_form<TripleState>(u0_fwd, u0_bwd, a0,
                                                   random_local_triple(200 + seed, 2));
    const TripleState Phi = random_local_triple(200 + seed, 2);
    lhs.add_scaled(Phi, Complex(-2.0, 0.0));
    CHECK(lhs.norm() <= 1e-12 * Phi.norm());

    const WalkState phi = random_local_state(300 + seed, 2);
    WalkState tl = commutator_form<WalkState>(ut_fwd, ut_bwd, at, phi);
    tl.add_scaled(phi, Complex(-2.0, 0.0));
    CHECK(tl.norm() <= 1e-12 * phi.norm());
  }
}

TEST_CASE("interacting commutator defect decays along shells") {
  const CoinField coin(smooth_config());
  const auto u_fwd = std::function<WalkState(const WalkState&)>(
      [&](const WalkState& s) { return apply_U(coin, s); });
  const auto u_bwd = std::function<WalkState(const WalkState&)>(
      [&](const WalkState& s) { return apply_U_inv(coin, s); });
  const auto at = std::function<WalkState(const WalkState&)>(
      [](const WalkState& s) { return apply_A_tilde(s); });

  double near = 0.0;
  double far = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    WalkState d2 = commutator_form<WalkState>(u_fwd, u_bwd, at,
                                              random_shell_state(400 + seed, 2));
    const WalkState p2 = random_shell_state(400 + seed, 2);
    d2.add_scaled(p2, Complex(-2.0, 0.0));
    near = std::max(near, d2.norm());

    WalkState d16 = commutator_form<WalkState>(u_fwd, u_bwd, at,
                                               random_shell_state(400 + seed, 16));
    const WalkState p16 = random_shell_state(400 + seed, 16);
    d16.add_scaled(p16, Complex(-2.0, 0.0));
    far = std::max(far, d16.norm());
  }
  CHECK(far < near);
  CHECK(far <= 8.0 * coin.decay_constant() * std::pow(japanese_bracket(16), -1.0));
}

TEST_CASE("weighted coupling tail estimates shrink with the cutoff") {
  const CoinField coin(smooth_config());
  PowerIterationOptions opts;
  const double t2 = va0_tail_norm(coin, 2, opts);
  const double t8 = va0_tail_norm(coin, 8, opts);
  CHECK(t2 >= 0.0);
  CHECK(t8 >= 0.0);
  CHECK(t8 < t2 + 1e-12);
}
