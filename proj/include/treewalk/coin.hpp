#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treewalk/word.hpp"

namespace treewalk {

using Matrix3cd = Eigen::Matrix3cd;

enum class CoinPreset { kPure, kSmoothDecay, kFiniteDefect };

const char* to_string(CoinPreset preset);
CoinPreset coin_preset_from_string(const std::string& name);

/// Parameters defining a position-dependent coin field.
///
/// The asymptotic coins are diagonal phase matrices C_k = diag(e^{i a}).
/// - pure:          C(x) = C_{class(x)}
/// - smooth-decay:  C(x) = exp(i g <x>^{-(1+eps_class)} H) C_{class(x)}
/// - finite-defect: arbitrary unitaries on a finite site list, asymptotic
///                  coin elsewhere
struct CoinConfig {
  CoinPreset preset = CoinPreset::kPure;
  std::array<std::array<double, 3>, 3> phases{{{0.0, 0.9, -0.7},
                                               {0.4, -1.1, 0.25},
                                               {-0.5, 0.6, 1.3}}};
  std::array<double, 3> eps{1.0, 1.0, 1.0};
  double g = 0.3;
  Matrix3cd H = default_mixing_generator();
  std::vector<std::pair<TreeWord, Matrix3cd>> defects;
  std::uint64_t seed = 0;

  static Matrix3cd default_mixing_generator();
};

/// Position-dependent coin with per-(norm, class) memoisation.  Copies are
/// cheap apart from the cache; instances are not meant to be shared across
/// threads (each job should own one).
class CoinField {
public:
  explicit CoinField(CoinConfig config);

  const CoinConfig& config() const { return cfg_; }
  CoinPreset preset() const { return cfg_.preset; }

  /// Asymptotic coin for class k in {1,2,3}.
  const Matrix3cd& asymptotic(int k) const { return asymptotic_[k - 1]; }

  /// C(x).
  const Matrix3cd& matrix(const TreeWord& x) const;

  /// True when C(x) == C_{class(x)} everywhere.
  bool is_pure() const {
    return cfg_.preset == CoinPreset::kPure ||
           (cfg_.preset == CoinPreset::kSmoothDecay && cfg_.g == 0.0) ||
           (cfg_.preset == CoinPreset::kFiniteDefect && cfg_.defects.empty());
  }

  double eps(int k) const { return cfg_.eps[k - 1]; }
  double eps_min() const {
    return std::min({cfg_.eps[0], cfg_.eps[1], cfg_.eps[2]});
  }

  /// Constant in the decay bound ||C(x) - C_class|| <= const <x>^{-(1+eps)}.
  double decay_constant() const;

private:
  CoinConfig cfg_;
  std::array<Matrix3cd, 3> asymptotic_;
  std::unordered_map<TreeWord, Matrix3cd, WordHash> defect_map_;
  mutable std::unordered_map<std::uint64_t, Matrix3cd> cache_;
};

/// || M ||_2 (largest singular value).
double operator_norm(const Matrix3cd& m);

/// || M* M - 1 ||_2; zero for unitaries.
double unitarity_defect(const Matrix3cd& m);

}  // namespace treewalk
