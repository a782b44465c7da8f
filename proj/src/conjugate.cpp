#include "treewalk/conjugate.hpp"

#include <cmath>

namespace treewalk {

std::int64_t a_weight(const TreeWord& x, int i, int j) {
  const int k = 6 - i - j;
  const std::int64_t base = x.modified_norm(k);
  const TreeWord moved = x.translated(x.even() ? j : i);
  const std::int64_t stepped = moved.modified_norm(k);
  return stepped * stepped - base * base;
}

WalkState apply_A_tilde(const WalkState& s) {
  WalkState out = s;
  for (auto& [site, v] : out.amplitudes()) {
    for (int spin = 0; spin < 3; ++spin) {
      v[spin] *= static_cast<double>(a_weight(site, kSpinPair[spin][0], kSpinPair[spin][1]));
    }
  }
  out.prune();
  return out;
}

TripleState apply_A0(const TripleState& t) {
  TripleState out;
  for (int k = 0; k < 3; ++k) out.comp[k] = apply_A_tilde(t.comp[k]);
  return out;
}

WalkState apply_A_via_J(const WalkState& s) {
  return apply_J(apply_A0(apply_J_star(s)));
}

SecondDifferenceReport verify_second_difference(int radius, const BallConfig& config) {
  BallIndex ball;
  ball.build(radius, config);
  SecondDifferenceReport report;
  report.radius = radius;

  for (std::uint32_t idx = 0; idx < ball.size(); ++idx) {
    const TreeWord& x = ball.word(idx);
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        if (i == j) continue;
        const int k = 6 - i - j;
        const TreeWord one = x.translated(x.even() ? j : i);
        const TreeWord two = one.translated(one.even() ? j : i);
        const std::int64_t n0 = x.modified_norm(k);
        const std::int64_t n1 = one.modified_norm(k);
        const std::int64_t n2 = two.modified_norm(k);
        const std::int64_t second = n2 * n2 - 2 * n1 * n1 + n0 * n0;
        ++report.checked;
        if (second != 2) {
          report.failures.push_back(SecondDifferenceFailure{x, i, j, second});
        }
      }
    }
  }
  return report;
}

double va0_tail_norm(const CoinField& coin, int r, const PowerIterationOptions& opts) {
  // Restriction P to norms >= r.
  auto project = [r](const TripleState& t) {
    TripleState out;
    for (int k = 0; k < 3; ++k) {
      out.comp[k] = weight_multiply(
          t.comp[k], [r](const TreeWord& x) { return x.norm() >= r ? 1.0 : 0.0; });
    }
    return out;
  };

  TripleState probe;
  {
    GaussianSource rng(opts.seed);
    for (int k = 0; k < 3; ++k) {
      WalkState& c = probe.comp[k];
      for (int site = 0; site < 4; ++site) {
        TreeWord w;
        const int length =
            r + static_cast<int>(rng.next_raw() % static_cast<std::uint64_t>(opts.probe_window + 1));
        for (int l = 0; l < length; ++l) {
          int g;
          do {
            g = 1 + static_cast<int>(rng.next_raw() % 3);
          } while (g == w.last_letter());
          w.append(g);
        }
        for (int spin = 0; spin < 3; ++spin) c.add(w, spin, rng.next_complex());
      }
    }
    const double n = probe.norm();
    if (n > 0.0) probe.scale(Complex(1.0 / n, 0.0));
  }

  double lambda = 0.0;
  TripleState psi = project(probe);
  for (int it = 0; it < opts.iterations; ++it) {
    const double pn = psi.norm();
    if (pn < 1e-280) return 0.0;
    psi.scale(Complex(1.0 / pn, 0.0));

    const WalkState forward = apply_V(coin, apply_A0(psi), opts.limits);
    TripleState next = project(apply_A0(apply_V_adjoint(coin, forward, opts.limits)));

    const double estimate = std::sqrt(std::abs(inner_product(psi, next).real()));
    if (it > 0 && std::abs(estimate - lambda) <= opts.tolerance * std::max(1.0, estimate)) {
      lambda = estimate;
      break;
    }
    lambda = estimate;
    psi = std::move(next);
  }
  return lambda;
}

}  // namespace treewalk
