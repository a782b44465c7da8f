#pragma once

#include <iosfwd>
#include <string>

#include "treewalk/state.hpp"

namespace treewalk {

/// Writes one JSON record per support site, breadth-first order:
///   {"site": "121", "amp": [[re,im],[re,im],[re,im]]}
void write_state_jsonl(std::ostream& out, const WalkState& state);
void write_state_jsonl(const std::string& path, const WalkState& state);

/// Reads the JSON-lines format back; repeated sites accumulate.
WalkState read_state_jsonl(std::istream& in);
WalkState read_state_jsonl(const std::string& path);

}  // namespace treewalk
