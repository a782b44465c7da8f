#include "treewalk/state.hpp"

#include <cmath>

namespace treewalk {

Complex inner_product(const WalkState& a, const WalkState& b) {
  const WalkState& small = a.support_size() <= b.support_size() ? a : b;
  const WalkState& large = a.support_size() <= b.support_size() ? b : a;
  const bool conjugate_small = &small == &a;

  Complex total(0.0, 0.0);
  for (const auto* kv : small.sorted_entries()) {
    auto it = large.amplitudes().find(kv->first);
    if (it == large.amplitudes().end()) continue;
    Complex site(0.0, 0.0);
    for (int s = 0; s < 3; ++s) {
      site += conjugate_small ? std::conj(kv->second[s]) * it->second[s]
                              : std::conj(it->second[s]) * kv->second[s];
    }
    total += site;
  }
  return total;
}

Complex inner_product(const TripleState& a, const TripleState& b) {
  return inner_product(a.comp[0], b.comp[0]) + inner_product(a.comp[1], b.comp[1]) +
         inner_product(a.comp[2], b.comp[2]);
}

std::uint64_t GaussianSource::next_raw() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double GaussianSource::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on uniforms built from the top 53 bits.
  double u1 = 0.0;
  while (u1 == 0.0) {
    u1 = static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
  }
  const double u2 = static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

namespace {

TreeWord random_word(GaussianSource& rng, int min_norm, int max_norm) {
  const int span = max_norm - min_norm + 1;
  const int n = min_norm + static_cast<int>(rng.next_raw() % static_cast<std::uint64_t>(span));
  TreeWord w;
  for (int i = 0; i < n; ++i) {
    const int last = w.last_letter();
    int g;
    do {
      g = 1 + static_cast<int>(rng.next_raw() % 3);
    } while (g == last);
    w.append(g);
  }
  return w;
}

WalkState random_state_impl(std::uint64_t seed, int min_norm, int max_norm, int sites) {
  GaussianSource rng(seed);
  WalkState s;
  for (int i = 0; i < sites; ++i) {
    const TreeWord w = random_word(rng, min_norm, max_norm);
    for (int spin = 0; spin < 3; ++spin) s.add(w, spin, rng.next_complex());
  }
  const double n = s.norm();
  if (n > 0.0) s.scale(Complex(1.0 / n, 0.0));
  return s;
}

}  // namespace

WalkState random_local_state(std::uint64_t seed, int radius, int sites) {
  return random_state_impl(seed, 0, radius, sites);
}

WalkState random_shell_state(std::uint64_t seed, int r, int sites) {
  return random_state_impl(seed, r, r, sites);
}

TripleState random_local_triple(std::uint64_t seed, int radius, int sites) {
  TripleState t;
  for (int k = 0; k < 3; ++k) {
    t.comp[k] = random_local_state(seed * 3 + 0x51ed2701ull * (k + 1), radius, sites);
  }
  const double n = t.norm();
  if (n > 0.0) t.scale(Complex(1.0 / n, 0.0));
  return t;
}

}  // namespace treewalk
