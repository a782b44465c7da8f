#include "treewalk/word.hpp"

#include <cmath>

namespace treewalk {

std::string TreeWord::text() const {
  if (len_ == 0) return "e";
  std::string out;
  out.reserve(len_);
  for (int i = 0; i < len_; ++i) out.push_back(static_cast<char>('0' + letter(i)));
  return out;
}

TreeWord TreeWord::parse(std::string_view text) {
  if (text.empty()) throw ConfigError("empty word; use \"e\" for the identity");
  if (text == "e") return TreeWord{};
  TreeWord w;
  int prev = 0;
  for (char c : text) {
    if (c < '1' || c > '3') {
      throw ConfigError("invalid word \"" + std::string(text) +
                        "\": letters must be 1, 2 or 3");
    }
    const int g = c - '0';
    if (g == prev) {
      throw ConfigError("word \"" + std::string(text) + "\" is not reduced");
    }
    if (w.norm() >= kMaxLetters) throw CapacityError("word length limit exceeded");
    w.append(g);
    prev = g;
  }
  return w;
}

}  // namespace treewalk
