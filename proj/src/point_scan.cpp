#include "treewalk/point_scan.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "treewalk/state.hpp"
#include "treewalk/walk_ops.hpp"

namespace treewalk {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Compressed walk on the ball: coin at every site, then transport, dropping
/// amplitudes that would leave the ball.
class TruncatedWalk {
public:
  TruncatedWalk(const CoinField& coin, const BallIndex& ball)
      : ball_(ball), dim_(3 * ball.size()) {
    coins_.reserve(ball.size());
    targets_.resize(dim_);
    for (std::uint32_t idx = 0; idx < ball.size(); ++idx) {
      const TreeWord& x = ball.word(idx);
      coins_.push_back(coin.matrix(x));
      for (int s = 0; s < 3; ++s) {
        const TreeWord moved = transport(x, kSpinPair[s][0], kSpinPair[s][1]);
        const auto found = ball.lookup(moved);
        targets_[3 * idx + s] =
            found ? static_cast<std::int64_t>(3 * *found + s) : -1;
      }
    }
  }

  std::size_t dimension() const { return dim_; }

  VectorXcd apply(const VectorXcd& v) const {
    VectorXcd out = VectorXcd::Zero(static_cast<Eigen::Index>(dim_));
    for (std::uint32_t idx = 0; idx < ball_.size(); ++idx) {
      const Eigen::Vector3cd local = coins_[idx] * v.segment<3>(3 * idx);
      for (int s = 0; s < 3; ++s) {
        const std::int64_t t = targets_[3 * idx + s];
        if (t >= 0) out(t) = local(s);
      }
    }
    return out;
  }

  double boundary_weight(const VectorXcd& v, int margin) const {
    const int cut = std::max(0, ball_.radius() - margin);
    double boundary = 0.0;
    double total = 0.0;
    for (std::uint32_t idx = 0; idx < ball_.size(); ++idx) {
      const double m = v.segment<3>(3 * idx).squaredNorm();
      total += m;
      if (ball_.word(idx).norm() >= cut) boundary += m;
    }
    return total > 0.0 ? boundary / total : 0.0;
  }

private:
  const BallIndex& ball_;
  std::size_t dim_;
  std::vector<Matrix3cd> coins_;
  std::vector<std::int64_t> targets_;
};

MatrixXcd deterministic_block(std::size_t dim, int block, std::uint64_t seed) {
  GaussianSource rng(seed);
  MatrixXcd q(static_cast<Eigen::Index>(dim), block);
  for (int c = 0; c < block; ++c) {
    for (std::size_t r = 0; r < dim; ++r) {
      q(static_cast<Eigen::Index>(r), c) = rng.next_complex();
    }
  }
  return q;
}

void orthonormalize(MatrixXcd& q) {
  Eigen::HouseholderQR<MatrixXcd> qr(q);
  const MatrixXcd thin =
      qr.householderQ() * MatrixXcd::Identity(q.rows(), q.cols());
  q = thin;
}

}  // namespace

ScanResult point_spectrum_scan(const CoinField& coin, int radius, const ScanOptions& opts) {
  BallIndex ball;
  ball.build(radius, opts.ball);
  const TruncatedWalk walk(coin, ball);

  ScanResult result;
  result.radius = radius;
  result.dimension = walk.dimension();

  const int block = std::min<int>(opts.block, static_cast<int>(walk.dimension()));
  MatrixXcd q = deterministic_block(walk.dimension(), block, opts.seed);
  orthonormalize(q);

  std::vector<double> previous_moduli;
  int stable_checks = 0;

  auto ritz_pass = [&](bool final_pass) {
    MatrixXcd uq(q.rows(), q.cols());
    for (int c = 0; c < block; ++c) uq.col(c) = walk.apply(q.col(c));
    const MatrixXcd h = q.adjoint() * uq;
    Eigen::ComplexEigenSolver<MatrixXcd> es(h);

    std::vector<double> moduli;
    std::vector<ScanCandidate> found;
    double max_converged = 0.0;
    for (int e = 0; e < block; ++e) {
      const std::complex<double> lambda = es.eigenvalues()(e);
      const VectorXcd vec = q * es.eigenvectors().col(e);
      const double residual = (walk.apply(vec) - lambda * vec).norm() / vec.norm();
      moduli.push_back(std::abs(lambda));
      if (residual <= opts.residual_tol) {
        max_converged = std::max(max_converged, std::abs(lambda));
        if (std::abs(lambda) >= opts.modulus_threshold) {
          const double bw = walk.boundary_weight(vec, opts.interior_margin);
          if (bw < opts.boundary_threshold) {
            ScanCandidate cand;
            cand.phase = std::arg(lambda);
            cand.modulus = std::abs(lambda);
            cand.boundary_weight = bw;
            cand.residual = residual;
            found.push_back(cand);
          }
        }
      }
    }
    std::sort(moduli.begin(), moduli.end(), std::greater<double>());

    bool stable = false;
    if (moduli.size() == previous_moduli.size()) {
      stable = true;
      for (std::size_t i = 0; i < moduli.size(); ++i) {
        if (std::abs(moduli[i] - previous_moduli[i]) >
            opts.stability_tol * std::max(1.0, moduli[i])) {
          stable = false;
          break;
        }
      }
    }
    previous_moduli = moduli;
    stable_checks = stable ? stable_checks + 1 : 0;

    if (final_pass || stable_checks >= 3) {
      std::sort(found.begin(), found.end(),
                [](const ScanCandidate& a, const ScanCandidate& b) {
                  return a.phase < b.phase;
                });
      result.candidates = found;
      result.max_modulus = max_converged;
    }
    return stable_checks >= 3;
  };

  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    MatrixXcd next(q.rows(), q.cols());
    for (int c = 0; c < block; ++c) next.col(c) = walk.apply(q.col(c));
    const double biggest = next.colwise().norm().maxCoeff();
    if (biggest < 1e-200) {
      // The compression is nilpotent on the sample space (no mixing):
      // nothing survives, so there are no interior candidates.
      result.converged = true;
      result.iterations = it + 1;
      result.max_modulus = 0.0;
      result.candidates.clear();
      return result;
    }
    q = next;
    if ((it + 1) % opts.qr_every == 0) orthonormalize(q);
    if ((it + 1) % opts.ritz_every == 0) {
      orthonormalize(q);
      if (ritz_pass(false)) {
        result.converged = true;
        result.iterations = it + 1;
        return result;
      }
    }
  }
  orthonormalize(q);
  ritz_pass(true);
  result.converged = false;
  result.iterations = it;
  return result;
}

std::vector<ScanResult> scan_with_stability(const CoinField& coin,
                                            const std::vector<int>& radii,
                                            const ScanOptions& opts) {
  std::vector<ScanResult> results;
  results.reserve(radii.size());
  for (int r : radii) results.push_back(point_spectrum_scan(coin, r, opts));

  auto phase_gap = [](double a, double b) {
    double d = std::remainder(a - b, 2.0 * M_PI);
    return std::abs(d);
  };

  for (std::size_t i = 0; i < results.size(); ++i) {
    for (ScanCandidate& cand : results[i].candidates) {
      bool everywhere = true;
      for (std::size_t j = 0; j < results.size(); ++j) {
        if (j == i) continue;
        bool matched = false;
        for (const ScanCandidate& other : results[j].candidates) {
          if (phase_gap(cand.phase, other.phase) <= opts.phase_tol) {
            matched = true;
            break;
          }
        }
        if (!matched) {
          everywhere = false;
          break;
        }
      }
      cand.stable = everywhere && results.size() > 1;
    }
  }
  return results;
}

}  // namespace treewalk
