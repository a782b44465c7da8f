#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "treewalk/word.hpp"

namespace treewalk {

using Complex = std::complex<double>;
using Vec3c = std::array<Complex, 3>;

inline double squared_length(const Vec3c& v) {
  return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}

struct EvolutionLimits {
  int max_radius = 88;
  // Guards memory: a state of this size is ~600 MB, and evolutions that need
  // more should raise a capacity error rather than exhaust the machine.
  std::size_t max_sites = std::size_t(1) << 22;
};

/// Sparse vector in l^2(tree, C^3): site word -> spin amplitudes.
///
/// All reductions (norms, inner products, dumps) run in breadth-first site
/// order so results do not depend on hash iteration order.  A drop tolerance
/// of zero (the default) removes only exactly-zero 3-vectors; a positive
/// tolerance prunes sites below it and accumulates the discarded mass.
class WalkState {
public:
  using Map = std::unordered_map<TreeWord, Vec3c, WordHash>;

  WalkState() = default;

  static WalkState basis(const TreeWord& site, int spin) {
    WalkState s;
    Vec3c v{};
    v[spin] = Complex(1.0, 0.0);
    s.amp_.emplace(site, v);
    s.radius_ = site.norm();
    return s;
  }

  static WalkState point(const TreeWord& site, const Vec3c& v) {
    WalkState s;
    s.amp_.emplace(site, v);
    s.radius_ = site.norm();
    return s;
  }

  const Map& amplitudes() const { return amp_; }
  Map& amplitudes() { return amp_; }

  std::size_t support_size() const { return amp_.size(); }
  int support_radius() const { return radius_; }
  bool empty() const { return amp_.empty(); }

  double drop_tolerance() const { return drop_tol_; }
  void set_drop_tolerance(double tol) { drop_tol_ = tol; }
  double pruned_mass() const { return pruned_mass2_; }
  void add_pruned_mass(double m2) { pruned_mass2_ += m2; }

  Vec3c at(const TreeWord& site) const {
    auto it = amp_.find(site);
    return it == amp_.end() ? Vec3c{} : it->second;
  }

  void set(const TreeWord& site, const Vec3c& v) {
    amp_[site] = v;
    radius_ = std::max(radius_, site.norm());
  }

  void add(const TreeWord& site, int spin, Complex z) {
    amp_[site][spin] += z;
    radius_ = std::max(radius_, site.norm());
  }

  /// Removes zero (or below-tolerance) sites and refreshes the radius.
  void prune() {
    const double t2 = drop_tol_ * drop_tol_;
    int r = 0;
    for (auto it = amp_.begin(); it != amp_.end();) {
      const double m2 = squared_length(it->second);
      if (m2 <= t2 && (drop_tol_ > 0.0 || m2 == 0.0)) {
        pruned_mass2_ += m2;
        it = amp_.erase(it);
      } else {
        r = std::max(r, it->first.norm());
        ++it;
      }
    }
    radius_ = r;
  }

  /// Support words in breadth-first order.
  std::vector<const Map::value_type*> sorted_entries() const {
    std::vector<const Map::value_type*> list;
    list.reserve(amp_.size());
    for (const auto& kv : amp_) list.push_back(&kv);
    std::sort(list.begin(), list.end(),
              [](const auto* a, const auto* b) { return a->first < b->first; });
    return list;
  }

  double squared_norm() const {
    double total = 0.0;
    for (const auto* kv : sorted_entries()) total += squared_length(kv->second);
    return total;
  }

  double norm() const { return std::sqrt(squared_norm()); }

  void scale(Complex z) {
    for (auto& kv : amp_) {
      kv.second[0] *= z;
      kv.second[1] *= z;
      kv.second[2] *= z;
    }
  }

  /// this += z * other.
  void add_scaled(const WalkState& other, Complex z) {
    for (const auto& kv : other.amp_) {
      Vec3c& v = amp_[kv.first];
      v[0] += z * kv.second[0];
      v[1] += z * kv.second[1];
      v[2] += z * kv.second[2];
    }
    radius_ = std::max(radius_, other.radius_);
  }

private:
  Map amp_;
  int radius_ = 0;
  double drop_tol_ = 0.0;
  double pruned_mass2_ = 0.0;
};

/// <a, b>, antilinear in the first argument, summed in breadth-first order
/// over the smaller support.
Complex inner_product(const WalkState& a, const WalkState& b);

inline WalkState difference(const WalkState& a, const WalkState& b) {
  WalkState d = a;
  d.add_scaled(b, Complex(-1.0, 0.0));
  d.prune();
  return d;
}

inline double distance(const WalkState& a, const WalkState& b) {
  return difference(a, b).norm();
}

/// Element of the reference space: three walk states, one per channel.
struct TripleState {
  std::array<WalkState, 3> comp;

  static TripleState diagonal(const WalkState& s) { return TripleState{{s, s, s}}; }

  double squared_norm() const {
    return comp[0].squared_norm() + comp[1].squared_norm() + comp[2].squared_norm();
  }
  double norm() const { return std::sqrt(squared_norm()); }

  std::size_t support_size() const {
    return comp[0].support_size() + comp[1].support_size() + comp[2].support_size();
  }
  int support_radius() const {
    return std::max({comp[0].support_radius(), comp[1].support_radius(),
                     comp[2].support_radius()});
  }

  void scale(Complex z) {
    for (auto& c : comp) c.scale(z);
  }
  void add_scaled(const TripleState& other, Complex z) {
    for (int k = 0; k < 3; ++k) comp[k].add_scaled(other.comp[k], z);
  }
  void prune() {
    for (auto& c : comp) c.prune();
  }
  void set_drop_tolerance(double tol) {
    for (auto& c : comp) c.set_drop_tolerance(tol);
  }
  double drop_tolerance() const { return comp[0].drop_tolerance(); }
};

Complex inner_product(const TripleState& a, const TripleState& b);

inline TripleState difference(const TripleState& a, const TripleState& b) {
  TripleState d = a;
  d.add_scaled(b, Complex(-1.0, 0.0));
  d.prune();
  return d;
}

inline double distance(const TripleState& a, const TripleState& b) {
  return difference(a, b).norm();
}

/// Deterministic standard-normal generator (64-bit splitmix + Box-Muller),
/// platform independent for a fixed seed.
class GaussianSource {
public:
  explicit GaussianSource(std::uint64_t seed) : state_(seed) {}

  double next();
  Complex next_complex() {
    const double re = next();
    const double im = next();
    return Complex(re, im);
  }
  std::uint64_t next_raw();

private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Normalized random state on seeded sites within the given radius.
/// `sites` words are drawn uniformly from the ball (with replacement,
/// duplicates merge); every spin gets an independent complex Gaussian.
WalkState random_local_state(std::uint64_t seed, int radius, int sites = 4);

/// Normalized random state supported on seeded words of norm exactly r.
WalkState random_shell_state(std::uint64_t seed, int r, int sites = 4);

TripleState random_local_triple(std::uint64_t seed, int radius, int sites = 4);

}  // namespace treewalk
