#include "treewalk/ball.hpp"

#include <stdexcept>
#include <string>

namespace treewalk {

void BallIndex::build(int radius, const BallConfig& config) {
  if (radius < 0) throw ConfigError("ball radius must be nonnegative");
  if (radius > config.max_radius) {
    throw CapacityError("ball radius " + std::to_string(radius) +
                        " exceeds configured maximum " +
                        std::to_string(config.max_radius));
  }
  const std::size_t expected = ball_size(radius);
  if (expected > config.max_sites) {
    throw CapacityError("ball of radius " + std::to_string(radius) +
                        " needs " + std::to_string(expected) +
                        " sites, above the configured limit");
  }

  radius_ = radius;
  sites_.clear();
  mod_norms_.clear();
  index_.clear();
  sites_.reserve(expected);
  mod_norms_.reserve(expected);
  index_.reserve(expected);
  level_offsets_.assign(1, 0);

  sites_.push_back(TreeWord{});
  std::size_t level_start = 0;
  for (int level = 1; level <= radius; ++level) {
    level_offsets_.push_back(static_cast<std::uint32_t>(sites_.size()));
    const std::size_t level_stop = sites_.size();
    for (std::size_t p = level_start; p < level_stop; ++p) {
      const TreeWord parent = sites_[p];
      const int skip = parent.last_letter();
      for (int g = 1; g <= 3; ++g) {
        if (g == skip) continue;
        sites_.push_back(parent.translated(g));
      }
    }
    level_start = level_stop;
  }
  level_offsets_.push_back(static_cast<std::uint32_t>(sites_.size()));
  if (sites_.size() != expected) {
    throw std::logic_error("ball enumeration size mismatch");
  }

  for (std::uint32_t i = 0; i < sites_.size(); ++i) {
    const TreeWord& w = sites_[i];
    index_.emplace(w, i);
    mod_norms_.push_back({static_cast<std::uint16_t>(w.modified_norm(1)),
                          static_cast<std::uint16_t>(w.modified_norm(2)),
                          static_cast<std::uint16_t>(w.modified_norm(3))});
  }
}

}  // namespace treewalk
