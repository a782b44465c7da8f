#include "treewalk/state_io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace treewalk {

using nlohmann::json;

void write_state_jsonl(std::ostream& out, const WalkState& state) {
  for (const auto* kv : state.sorted_entries()) {
    json rec;
    rec["site"] = kv->first.text();
    json amps = json::array();
    for (int s = 0; s < 3; ++s) {
      amps.push_back({kv->second[s].real(), kv->second[s].imag()});
    }
    rec["amp"] = std::move(amps);
    out << rec.dump() << '\n';
  }
}

void write_state_jsonl(const std::string& path, const WalkState& state) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  write_state_jsonl(out, state);
}

WalkState read_state_jsonl(std::istream& in) {
  WalkState state;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError("state line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("site") || !rec.contains("amp")) {
      throw ConfigError("state line " + std::to_string(line_no) +
                        ": expected {\"site\", \"amp\"}");
    }
    const TreeWord site = TreeWord::parse(rec["site"].get<std::string>());
    const json& amps = rec["amp"];
    if (!amps.is_array() || amps.size() != 3) {
      throw ConfigError("state line " + std::to_string(line_no) +
                        ": amp must hold three [re,im] pairs");
    }
    for (int s = 0; s < 3; ++s) {
      const json& pair = amps[s];
      if (!pair.is_array() || pair.size() != 2) {
        throw ConfigError("state line " + std::to_string(line_no) +
                          ": amp entries must be [re,im]");
      }
      const Complex z(pair[0].get<double>(), pair[1].get<double>());
      if (z != Complex(0.0, 0.0)) state.add(site, s, z);
    }
  }
  return state;
}

WalkState read_state_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open state file " + path);
  return read_state_jsonl(in);
}

}  // namespace treewalk
