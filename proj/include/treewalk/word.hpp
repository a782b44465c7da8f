#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treewalk {

/// Thrown when an operation would exceed a configured size limit.
class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown on invalid user-supplied input (text words, JSON configs, ...).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A reduced word over three involutive generators a1, a2, a3.
///
/// Letters take the values 1, 2, 3 and are packed two bits apiece, most
/// significant pair first, so that comparing (length, bits) lexicographically
/// reproduces breadth-first enumeration order.  Right multiplication keeps
/// words reduced by cancelling a repeated trailing letter.
class TreeWord {
public:
  static constexpr int kMaxLetters = 96;
  static constexpr int kLettersPerLane = 32;

  TreeWord() = default;

  /// Reduces an arbitrary letter sequence (values in {1,2,3}).
  static TreeWord reduce(const std::vector<int>& letters) {
    TreeWord w;
    for (int g : letters) w.append(g);
    return w;
  }

  int norm() const { return len_; }
  bool is_identity() const { return len_ == 0; }
  bool even() const { return (len_ & 1) == 0; }

  /// Letter at position i (0-based from the left), in {1,2,3}.
  int letter(int i) const {
    const int lane = i / kLettersPerLane;
    const int shift = 62 - 2 * (i % kLettersPerLane);
    return static_cast<int>((bits_[lane] >> shift) & 3u);
  }

  int first_letter() const { return len_ == 0 ? 0 : letter(0); }
  int last_letter() const { return len_ == 0 ? 0 : letter(len_ - 1); }

  /// First letter, or 0 for the identity.  Branch 0 is the root.
  int branch() const { return first_letter(); }

  /// Partition class used by the block projections: the branch for nonroot
  /// sites, class 1 for the root.
  int chi_class() const { return len_ == 0 ? 1 : letter(0); }

  /// Right translation x -> x . a_g, cancelling if the word ends in a_g.
  void append(int g) {
    if (g < 1 || g > 3) throw ConfigError("generator index must be 1, 2 or 3");
    if (len_ > 0 && last_letter() == g) {
      pop_raw();
      return;
    }
    if (len_ >= kMaxLetters) throw CapacityError("word length limit exceeded");
    push_raw(g);
  }

  TreeWord translated(int g) const {
    TreeWord w = *this;
    w.append(g);
    return w;
  }

  /// Drops the last letter.  Precondition: nonempty.
  void pop_back() { pop_raw(); }

  /// Number of letters strictly after the last occurrence of k, or the whole
  /// length when k does not occur.
  int modified_norm(int k) const {
    for (int i = len_ - 1; i >= 0; --i) {
      if (letter(i) == k) return len_ - 1 - i;
    }
    return len_;
  }

  friend bool operator==(const TreeWord& a, const TreeWord& b) {
    return a.len_ == b.len_ && a.bits_ == b.bits_;
  }

  /// Orders by norm first, then by letters; matches BFS enumeration.
  friend std::strong_ordering operator<=>(const TreeWord& a, const TreeWord& b) {
    if (a.len_ != b.len_) return a.len_ <=> b.len_;
    for (int lane = 0; lane < 3; ++lane) {
      if (a.bits_[lane] != b.bits_[lane]) return a.bits_[lane] <=> b.bits_[lane];
    }
    return std::strong_ordering::equal;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull + len_;
    for (std::uint64_t lane : bits_) {
      h ^= lane + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdull;
      h ^= h >> 33;
    }
    return h;
  }

  /// "e" for the identity, otherwise the digit string, e.g. "1213".
  std::string text() const;

  /// Parses the text format.  Rejects words that are not reduced.
  static TreeWord parse(std::string_view text);

private:
  void push_raw(int g) {
    const int lane = len_ / kLettersPerLane;
    const int shift = 62 - 2 * (len_ % kLettersPerLane);
    bits_[lane] |= static_cast<std::uint64_t>(g) << shift;
    ++len_;
  }

  void pop_raw() {
    --len_;
    const int lane = len_ / kLettersPerLane;
    const int shift = 62 - 2 * (len_ % kLettersPerLane);
    bits_[lane] &= ~(std::uint64_t(3) << shift);
  }

  std::array<std::uint64_t, 3> bits_{};
  std::uint8_t len_ = 0;
};

struct WordHash {
  std::size_t operator()(const TreeWord& w) const { return w.hash(); }
};

/// Site data derived purely from the word.
struct SiteClassification {
  int norm;
  bool even;
  int branch;     // 0 for the root
  int chi_class;  // 1, 2 or 3
};

inline SiteClassification classify(const TreeWord& x) {
  return SiteClassification{x.norm(), x.even(), x.branch(), x.chi_class()};
}

/// <x> = sqrt(1 + |x|^2).
inline double japanese_bracket(const TreeWord& x) {
  const double n = static_cast<double>(x.norm());
  return std::sqrt(1.0 + n * n);
}

inline double japanese_bracket(int norm) {
  const double n = static_cast<double>(norm);
  return std::sqrt(1.0 + n * n);
}

}  // namespace treewalk
