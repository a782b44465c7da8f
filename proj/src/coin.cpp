#include "treewalk/coin.hpp"

#include <cmath>
#include <string>

namespace treewalk {

const char* to_string(CoinPreset preset) {
  switch (preset) {
    case CoinPreset::kPure: return "pure";
    case CoinPreset::kSmoothDecay: return "smooth-decay";
    case CoinPreset::kFiniteDefect: return "finite-defect";
  }
  return "?";
}

CoinPreset coin_preset_from_string(const std::string& name) {
  if (name == "pure") return CoinPreset::kPure;
  if (name == "smooth-decay") return CoinPreset::kSmoothDecay;
  if (name == "finite-defect") return CoinPreset::kFiniteDefect;
  throw ConfigError("unknown coin preset \"" + name + "\"");
}

Matrix3cd CoinConfig::default_mixing_generator() {
  Matrix3cd h;
  const std::complex<double> i(0.0, 1.0);
  h << 0.3, 1.0, 0.5 - 0.2 * i,
       1.0, -0.1, 0.8,
       0.5 + 0.2 * i, 0.8, 0.2;
  return h;
}

double operator_norm(const Matrix3cd& m) {
  Eigen::JacobiSVD<Matrix3cd> svd(m);
  return svd.singularValues()(0);
}

double unitarity_defect(const Matrix3cd& m) {
  return operator_norm(m.adjoint() * m - Matrix3cd::Identity());
}

namespace {

Matrix3cd phase_matrix(const std::array<double, 3>& phases) {
  Matrix3cd c = Matrix3cd::Zero();
  for (int s = 0; s < 3; ++s) {
    c(s, s) = std::polar(1.0, phases[s]);
  }
  return c;
}

Matrix3cd hermitian_exponential(const Matrix3cd& h, double tau) {
  // exp(i tau H) for Hermitian H via its spectral decomposition.
  Eigen::SelfAdjointEigenSolver<Matrix3cd> es(h);
  Matrix3cd phases = Matrix3cd::Zero();
  for (int s = 0; s < 3; ++s) {
    phases(s, s) = std::polar(1.0, tau * es.eigenvalues()(s));
  }
  return es.eigenvectors() * phases * es.eigenvectors().adjoint();
}

}  // namespace

CoinField::CoinField(CoinConfig config) : cfg_(std::move(config)) {
  for (int k = 0; k < 3; ++k) {
    asymptotic_[k] = phase_matrix(cfg_.phases[k]);
  }
  if (cfg_.preset == CoinPreset::kSmoothDecay) {
    for (int k = 0; k < 3; ++k) {
      if (!(cfg_.eps[k] > 0.0)) {
        throw ConfigError("decay exponent eps[" + std::to_string(k + 1) +
                          "] must be positive");
      }
    }
    const double herm = operator_norm(cfg_.H - Matrix3cd(cfg_.H.adjoint()));
    if (herm > 1e-12) {
      throw ConfigError("mixing generator H must be Hermitian");
    }
  }
  if (cfg_.preset == CoinPreset::kFiniteDefect) {
    for (const auto& [site, m] : cfg_.defects) {
      if (unitarity_defect(m) > 1e-12) {
        throw ConfigError("defect coin at site \"" + site.text() +
                          "\" is not unitary");
      }
      defect_map_[site] = m;
    }
  }
}

const Matrix3cd& CoinField::matrix(const TreeWord& x) const {
  if (!defect_map_.empty()) {
    auto it = defect_map_.find(x);
    if (it != defect_map_.end()) return it->second;
  }
  const int chi = x.chi_class();
  if (cfg_.preset != CoinPreset::kSmoothDecay || cfg_.g == 0.0) {
    return asymptotic_[chi - 1];
  }
  const std::uint64_t key = static_cast<std::uint64_t>(x.norm()) * 4 + chi;
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    const double tau =
        cfg_.g * std::pow(japanese_bracket(x), -(1.0 + cfg_.eps[chi - 1]));
    it = cache_.emplace(key, hermitian_exponential(cfg_.H, tau) * asymptotic_[chi - 1])
             .first;
  }
  return it->second;
}

double CoinField::decay_constant() const {
  if (cfg_.preset != CoinPreset::kSmoothDecay) return 0.0;
  return cfg_.g * operator_norm(cfg_.H);
}

}  // namespace treewalk
