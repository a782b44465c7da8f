#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "treewalk/word.hpp"

namespace treewalk {

struct BallConfig {
  int max_radius = 22;
  // Guard against runaway allocations; 2^24 covers the default radius.
  std::size_t max_sites = std::size_t(1) << 24;
};

/// Number of sites at distance exactly m from the root.
inline std::size_t sphere_size(int m) {
  return m == 0 ? 1 : std::size_t(3) << (m - 1);
}

/// Number of sites within distance R: 3 * 2^R - 2 for R >= 1, else 1.
inline std::size_t ball_size(int R) {
  return R == 0 ? 1 : (std::size_t(3) << R) - 2;
}

/// Dense enumeration of the ball of radius R, in breadth-first order with
/// children visited by increasing generator index.  Caches the three
/// modified norms per site; classification is recomputed from the word.
class BallIndex {
public:
  void build(int radius, const BallConfig& config = {});

  int radius() const { return radius_; }
  std::size_t size() const { return sites_.size(); }

  const TreeWord& word(std::uint32_t i) const { return sites_[i]; }
  std::optional<std::uint32_t> lookup(const TreeWord& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int modified_norm(std::uint32_t i, int k) const {
    return mod_norms_[i][k - 1];
  }

  /// Index of the first site with norm m (sites are sorted by norm).
  std::uint32_t level_begin(int m) const { return level_offsets_[m]; }
  std::uint32_t level_end(int m) const { return level_offsets_[m + 1]; }

  const std::vector<TreeWord>& sites() const { return sites_; }

private:
  int radius_ = 0;
  std::vector<TreeWord> sites_;
  std::vector<std::array<std::uint16_t, 3>> mod_norms_;
  std::unordered_map<TreeWord, std::uint32_t, WordHash> index_;
  std::vector<std::uint32_t> level_offsets_;
};

}  // namespace treewalk
