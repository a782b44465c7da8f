#pragma once

#include <cstdint>
#include <vector>

#include "treewalk/ball.hpp"
#include "treewalk/coin.hpp"

namespace treewalk {

struct ScanOptions {
  int block = 16;               // subspace dimension
  int max_iterations = 2500;    // power steps
  int qr_every = 5;             // re-orthonormalisation stride
  int ritz_every = 25;          // Rayleigh-Ritz + convergence-check stride
  double residual_tol = 1e-8;   // accept a Ritz pair below this residual
  double stability_tol = 1e-9;  // stop when sorted moduli move less than this
  double modulus_threshold = 1.0 - 1e-6;
  double boundary_threshold = 1e-4;
  int interior_margin = 2;      // boundary shell: norms >= R - margin
  double phase_tol = 1e-3;      // cross-radius phase matching
  std::uint64_t seed = 29;
  BallConfig ball{};
};

struct ScanCandidate {
  double phase = 0.0;     // eigenvalue argument in (-pi, pi]
  double modulus = 0.0;   // |lambda|
  double boundary_weight = 0.0;
  double residual = 0.0;
  bool stable = false;    // set by the cross-radius comparison
};

struct ScanResult {
  int radius = 0;
  std::size_t dimension = 0;
  int iterations = 0;
  bool converged = false;
  double max_modulus = 0.0;  // largest converged Ritz modulus seen
  std::vector<ScanCandidate> candidates;
};

/// Looks for point-spectrum candidates of the walk by compressing it to the
/// ball of radius R and running deterministic subspace iteration.  A phase
/// qualifies when its Ritz pair has converged, the modulus reaches the
/// threshold, and the vector carries almost no mass on the outermost shells
/// (interior localisation filters truncation artifacts).
ScanResult point_spectrum_scan(const CoinField& coin, int radius,
                               const ScanOptions& opts = {});

/// Runs the scan at each radius and marks candidates stable when a matching
/// phase (within phase_tol) appears at every other radius.  Returned in the
/// order of the given radii.
std::vector<ScanResult> scan_with_stability(const CoinField& coin,
                                            const std::vector<int>& radii,
                                            const ScanOptions& opts = {});

}  // namespace treewalk
