#include "treewalk/experiment_config.hpp"

#include <fstream>
#include <set>

#include "treewalk/walk_ops.hpp"

namespace treewalk {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kIdentityCheck: return "identity-check";
    case ExperimentKind::kSpectrum: return "spectrum";
    case ExperimentKind::kMourre: return "mourre";
    case ExperimentKind::kWave: return "wave";
    case ExperimentKind::kFullReport: return "full-report";
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "identity-check") return ExperimentKind::kIdentityCheck;
  if (name == "spectrum") return ExperimentKind::kSpectrum;
  if (name == "mourre") return ExperimentKind::kMourre;
  if (name == "wave") return ExperimentKind::kWave;
  if (name == "full-report") return ExperimentKind::kFullReport;
  throw ConfigError("unknown experiment \"" + name + "\"");
}

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError("unknown field \"" + key + "\" in " + where);
    }
  }
}

double number_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number()) {
    throw ConfigError(where + "." + key + " must be a number");
  }
  return j.at(key).get<double>();
}

std::array<double, 3> triple_at(const json& j, const std::string& key,
                                const std::string& where) {
  const json& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 3) {
    throw ConfigError(where + "." + key + " must be an array of three numbers");
  }
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

Matrix3cd matrix_from_json(const json& j, const std::string& where) {
  require_keys(j, where, {"re", "im"});
  Matrix3cd m = Matrix3cd::Zero();
  auto fill = [&](const char* part, bool imag) {
    if (!j.contains(part)) return;
    const json& rows = j.at(part);
    if (!rows.is_array() || rows.size() != 3) {
      throw ConfigError(where + "." + part + " must be a 3x3 array");
    }
    for (int r = 0; r < 3; ++r) {
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != 3) {
        throw ConfigError(where + "." + part + " must be a 3x3 array");
      }
      for (int c = 0; c < 3; ++c) {
        const double v = row[static_cast<std::size_t>(c)].get<double>();
        m(r, c) += imag ? Complex(0.0, v) : Complex(v, 0.0);
      }
    }
  };
  fill("re", false);
  fill("im", true);
  return m;
}

ordered_json matrix_to_json(const Matrix3cd& m) {
  ordered_json re = ordered_json::array();
  ordered_json im = ordered_json::array();
  for (int r = 0; r < 3; ++r) {
    ordered_json rre = ordered_json::array();
    ordered_json rim = ordered_json::array();
    for (int c = 0; c < 3; ++c) {
      rre.push_back(m(r, c).real());
      rim.push_back(m(r, c).imag());
    }
    re.push_back(rre);
    im.push_back(rim);
  }
  return ordered_json{{"re", re}, {"im", im}};
}

ProbeSpec parse_probe(const json& j, const std::string& where) {
  ProbeSpec spec;
  if (j.contains("site")) {
    require_keys(j, where, {"site", "spin", "evolve"});
    ProbeSpec::Basis b;
    b.site = TreeWord::parse(j.at("site").get<std::string>());
    b.spin = j.value("spin", 1);
    if (b.spin < 1 || b.spin > 3) {
      throw ConfigError(where + ".spin must be 1, 2 or 3");
    }
    spec.kind = b;
  } else if (j.contains("random")) {
    require_keys(j, where, {"random", "evolve"});
    const json& r = j.at("random");
    require_keys(r, where + ".random", {"seed", "radius", "sites"});
    ProbeSpec::Random rnd;
    rnd.seed = r.value("seed", 1ull);
    rnd.radius = r.value("radius", 2);
    rnd.sites = r.value("sites", 4);
    if (rnd.radius < 0) throw ConfigError(where + ".random.radius must be >= 0");
    if (rnd.sites < 1) throw ConfigError(where + ".random.sites must be >= 1");
    spec.kind = rnd;
  } else if (j.contains("shell")) {
    require_keys(j, where, {"shell", "evolve"});
    const json& r = j.at("shell");
    require_keys(r, where + ".shell", {"seed", "norm", "sites"});
    ProbeSpec::Shell sh;
    sh.seed = r.value("seed", 1ull);
    sh.norm = r.value("norm", 4);
    sh.sites = r.value("sites", 4);
    if (sh.norm < 0) throw ConfigError(where + ".shell.norm must be >= 0");
    if (sh.sites < 1) throw ConfigError(where + ".shell.sites must be >= 1");
    spec.kind = sh;
  } else {
    throw ConfigError(where + " must contain \"site\", \"random\" or \"shell\"");
  }
  spec.evolve = j.value("evolve", 0);
  if (spec.evolve < 0) throw ConfigError(where + ".evolve must be >= 0");
  return spec;
}

ordered_json probe_to_json(const ProbeSpec& spec) {
  ordered_json j;
  if (const auto* b = std::get_if<ProbeSpec::Basis>(&spec.kind)) {
    j["site"] = b->site.text();
    j["spin"] = b->spin;
  } else if (const auto* r = std::get_if<ProbeSpec::Random>(&spec.kind)) {
    j["random"] = ordered_json{{"seed", r->seed}, {"radius", r->radius}, {"sites", r->sites}};
  } else if (const auto* s = std::get_if<ProbeSpec::Shell>(&spec.kind)) {
    j["shell"] = ordered_json{{"seed", s->seed}, {"norm", s->norm}, {"sites", s->sites}};
  }
  j["evolve"] = spec.evolve;
  return j;
}

}  // namespace

WalkState ProbeSpec::resolve(const CoinField& coin, const EvolutionLimits& limits) const {
  WalkState state;
  if (const auto* b = std::get_if<Basis>(&kind)) {
    state = WalkState::basis(b->site, b->spin - 1);
  } else if (const auto* r = std::get_if<Random>(&kind)) {
    state = random_local_state(r->seed, r->radius, r->sites);
  } else if (const auto* s = std::get_if<Shell>(&kind)) {
    state = random_shell_state(s->seed, s->norm, s->sites);
  }
  for (int i = 0; i < evolve; ++i) state = apply_U(coin, state, limits);
  const double n = state.norm();
  if (n > 0.0) state.scale(Complex(1.0 / n, 0.0));
  return state;
}

std::string ProbeSpec::label() const {
  std::string base;
  if (const auto* b = std::get_if<Basis>(&kind)) {
    base = "site-" + b->site.text() + "-s" + std::to_string(b->spin);
  } else if (const auto* r = std::get_if<Random>(&kind)) {
    base = "random-r" + std::to_string(r->radius) + "-seed" + std::to_string(r->seed);
  } else if (const auto* s = std::get_if<Shell>(&kind)) {
    base = "shell-n" + std::to_string(s->norm) + "-seed" + std::to_string(s->seed);
  }
  if (evolve > 0) base += "-evolved" + std::to_string(evolve);
  return base;
}

CoinConfig parse_coin_config(const json& j) {
  require_keys(j, "coin",
               {"preset", "C1", "C2", "C3", "eps", "g", "H", "defects", "seed"});
  CoinConfig cfg;
  if (j.contains("preset")) {
    cfg.preset = coin_preset_from_string(j.at("preset").get<std::string>());
  }
  const char* names[3] = {"C1", "C2", "C3"};
  for (int k = 0; k < 3; ++k) {
    if (j.contains(names[k])) {
      cfg.phases[static_cast<std::size_t>(k)] = triple_at(j, names[k], "coin");
    }
  }
  if (j.contains("eps")) {
    const auto e = triple_at(j, "eps", "coin");
    cfg.eps = e;
  }
  if (j.contains("g")) cfg.g = number_at(j, "g", "coin");
  if (j.contains("H")) cfg.H = matrix_from_json(j.at("H"), "coin.H");
  if (j.contains("defects")) {
    const json& defects = j.at("defects");
    if (!defects.is_array()) throw ConfigError("coin.defects must be an array");
    for (std::size_t d = 0; d < defects.size(); ++d) {
      const std::string where = "coin.defects[" + std::to_string(d) + "]";
      require_keys(defects[d], where, {"site", "matrix"});
      const TreeWord site = TreeWord::parse(defects[d].at("site").get<std::string>());
      cfg.defects.emplace_back(site, matrix_from_json(defects[d].at("matrix"), where + ".matrix"));
    }
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

ordered_json coin_config_json(const CoinConfig& coin) {
  ordered_json j;
  j["preset"] = to_string(coin.preset);
  const char* names[3] = {"C1", "C2", "C3"};
  for (int k = 0; k < 3; ++k) {
    j[names[k]] = coin.phases[static_cast<std::size_t>(k)];
  }
  j["eps"] = coin.eps;
  j["g"] = coin.g;
  j["H"] = matrix_to_json(coin.H);
  ordered_json defects = ordered_json::array();
  for (const auto& [site, m] : coin.defects) {
    defects.push_back(ordered_json{{"site", site.text()}, {"matrix", matrix_to_json(m)}});
  }
  j["defects"] = defects;
  j["seed"] = coin.seed;
  return j;
}

void ExperimentConfig::validate() const {
  if (radius < 0) throw ConfigError("radius must be >= 0");
  if (hs_radius < 0) throw ConfigError("hs_radius must be >= 0");
  if (checks < 1) throw ConfigError("checks must be >= 1");
  if (degree < 0) throw ConfigError("degree must be >= 0");
  if (filter_degree < 0) throw ConfigError("filter_degree must be >= 0");
  if (grid < 8) throw ConfigError("grid must be >= 8");
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (smooth_n_max < 1) throw ConfigError("smooth_n_max must be >= 1");
  if (!(smooth_s >= 0.0)) throw ConfigError("smooth_s must be >= 0");
  if (drop_tolerance < 0.0) throw ConfigError("drop_tolerance must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (limits.max_radius < 1) throw ConfigError("limits.max_radius must be >= 1");
  for (const auto& w : windows) w.validate();
  for (int r : scan_radii) {
    if (r < 2) throw ConfigError("scan radii must be >= 2");
  }
}

ExperimentConfig parse_experiment_config(const json& j) {
  require_keys(j, "config",
               {"coin", "radius", "hs_radius", "checks", "degree", "filter_degree",
                "grid", "kernel", "windows", "probes", "modes", "direction", "n_max",
                "smooth_s", "smooth_n_max", "drop_tolerance", "limits", "thresholds",
                "scan", "seed", "threads"});
  ExperimentConfig cfg;
  if (j.contains("coin")) cfg.coin = parse_coin_config(j.at("coin"));
  cfg.radius = j.value("radius", cfg.radius);
  cfg.hs_radius = j.value("hs_radius", cfg.hs_radius);
  cfg.checks = j.value("checks", cfg.checks);
  cfg.degree = j.value("degree", cfg.degree);
  cfg.filter_degree = j.value("filter_degree", cfg.filter_degree);
  cfg.grid = j.value("grid", cfg.grid);
  if (j.contains("kernel")) {
    cfg.kernel = kernel_from_string(j.at("kernel").get<std::string>());
  }
  if (j.contains("windows")) {
    const json& ws = j.at("windows");
    if (!ws.is_array()) throw ConfigError("windows must be an array");
    cfg.windows.clear();
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const std::string where = "windows[" + std::to_string(i) + "]";
      require_keys(ws[i], where, {"center", "half_width"});
      SpectralWindow w;
      w.center = number_at(ws[i], "center", where);
      w.half_width = number_at(ws[i], "half_width", where);
      cfg.windows.push_back(w);
    }
  }
  if (j.contains("probes")) {
    const json& ps = j.at("probes");
    if (!ps.is_array()) throw ConfigError("probes must be an array");
    cfg.probes.clear();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      cfg.probes.push_back(parse_probe(ps[i], "probes[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("modes")) {
    const json& ms = j.at("modes");
    if (!ms.is_array()) throw ConfigError("modes must be an array");
    cfg.modes.clear();
    for (const auto& m : ms) {
      cfg.modes.push_back(wave_mode_from_string(m.get<std::string>()));
    }
  }
  if (j.contains("direction")) {
    const std::string d = j.at("direction").get<std::string>();
    if (d == "forward") {
      cfg.direction = TimeDirection::kForward;
    } else if (d == "backward") {
      cfg.direction = TimeDirection::kBackward;
    } else {
      throw ConfigError("direction must be \"forward\" or \"backward\"");
    }
  }
  cfg.n_max = j.value("n_max", cfg.n_max);
  cfg.smooth_s = j.value("smooth_s", cfg.smooth_s);
  cfg.smooth_n_max = j.value("smooth_n_max", cfg.smooth_n_max);
  cfg.drop_tolerance = j.value("drop_tolerance", cfg.drop_tolerance);
  if (j.contains("limits")) {
    const json& l = j.at("limits");
    require_keys(l, "limits", {"max_radius", "max_sites"});
    cfg.limits.max_radius = l.value("max_radius", cfg.limits.max_radius);
    cfg.limits.max_sites = l.value("max_sites", cfg.limits.max_sites);
  }
  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    require_keys(t, "thresholds", {"slope", "tail", "fit_first", "tail_first"});
    cfg.thresholds.slope = t.value("slope", cfg.thresholds.slope);
    cfg.thresholds.tail = t.value("tail", cfg.thresholds.tail);
    cfg.thresholds.fit_first = t.value("fit_first", cfg.thresholds.fit_first);
    cfg.thresholds.tail_first = t.value("tail_first", cfg.thresholds.tail_first);
  }
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    require_keys(s, "scan",
                 {"radii", "block", "max_iterations", "residual_tol", "modulus_threshold",
                  "boundary_threshold", "interior_margin", "phase_tol", "seed"});
    if (s.contains("radii")) {
      cfg.scan_radii = s.at("radii").get<std::vector<int>>();
    }
    cfg.scan.block = s.value("block", cfg.scan.block);
    cfg.scan.max_iterations = s.value("max_iterations", cfg.scan.max_iterations);
    cfg.scan.residual_tol = s.value("residual_tol", cfg.scan.residual_tol);
    cfg.scan.modulus_threshold = s.value("modulus_threshold", cfg.scan.modulus_threshold);
    cfg.scan.boundary_threshold = s.value("boundary_threshold", cfg.scan.boundary_threshold);
    cfg.scan.interior_margin = s.value("interior_margin", cfg.scan.interior_margin);
    cfg.scan.phase_tol = s.value("phase_tol", cfg.scan.phase_tol);
    cfg.scan.seed = s.value("seed", cfg.scan.seed);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

ordered_json resolved_config_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["coin"] = coin_config_json(cfg.coin);
  j["radius"] = cfg.radius;
  j["hs_radius"] = cfg.hs_radius;
  j["checks"] = cfg.checks;
  j["degree"] = cfg.degree;
  j["filter_degree"] = cfg.filter_degree;
  j["grid"] = cfg.grid;
  j["kernel"] = to_string(cfg.kernel);
  ordered_json ws = ordered_json::array();
  for (const auto& w : cfg.windows) {
    ws.push_back(ordered_json{{"center", w.center}, {"half_width", w.half_width}});
  }
  j["windows"] = ws;
  ordered_json ps = ordered_json::array();
  for (const auto& p : cfg.probes) ps.push_back(probe_to_json(p));
  j["probes"] = ps;
  ordered_json ms = ordered_json::array();
  for (const auto& m : cfg.modes) ms.push_back(to_string(m));
  j["modes"] = ms;
  j["direction"] = cfg.direction == TimeDirection::kForward ? "forward" : "backward";
  j["n_max"] = cfg.n_max;
  j["smooth_s"] = cfg.smooth_s;
  j["smooth_n_max"] = cfg.smooth_n_max;
  j["drop_tolerance"] = cfg.drop_tolerance;
  j["limits"] = ordered_json{{"max_radius", cfg.limits.max_radius},
                             {"max_sites", cfg.limits.max_sites}};
  j["thresholds"] = ordered_json{{"slope", cfg.thresholds.slope},
                                 {"tail", cfg.thresholds.tail},
                                 {"fit_first", cfg.thresholds.fit_first},
                                 {"tail_first", cfg.thresholds.tail_first}};
  j["scan"] = ordered_json{{"radii", cfg.scan_radii},
                           {"block", cfg.scan.block},
                           {"max_iterations", cfg.scan.max_iterations},
                           {"residual_tol", cfg.scan.residual_tol},
                           {"modulus_threshold", cfg.scan.modulus_threshold},
                           {"boundary_threshold", cfg.scan.boundary_threshold},
                           {"interior_margin", cfg.scan.interior_margin},
                           {"phase_tol", cfg.scan.phase_tol},
                           {"seed", cfg.scan.seed}};
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  return j;
}

}  // namespace treewalk
