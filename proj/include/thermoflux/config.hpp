#pragma once

// Run configuration: a sectioned `key = value` document with `#` comments.
// Parsing is strict; unknown, duplicate and inapplicable keys are errors.
//
//   [model]    kind, kappa1, kappa2, alpha, beta, conductivity, d_tilde | d | k
//   [grid]     dim, n, length
//   [initial]  rho0, theta0, rho_amplitude, theta_amplitude, rho_modes,
//              theta_modes, rho_shape, theta_shape
//   [solver]   dt_safety, t_end, integrator, abort_on_nonpositive_theta
//   [output]   directory, stride, snapshots, seed

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "thermoflux/error.hpp"
#include "thermoflux/grid.hpp"
#include "thermoflux/pde_solver.hpp"
#include "thermoflux/thermo_models.hpp"

namespace thermoflux {

enum class WaveShape { Sin, Cos };

struct GridConfig {
  int dim = 1;
  int n = 0;
  double length = 1.0;

  PeriodicGrid make() const { return PeriodicGrid(dim, n, length); }
  bool operator==(const GridConfig&) const = default;
};

/// rho = rho0 (1 + rho_amplitude * phi_rho), theta likewise, where phi is the
/// mean of shape(2 pi k s / L + phase) over the listed modes k and
/// s = x (1D) or x + y (2D). |phi| <= 1, so amplitudes below 1 keep the data
/// positive. Phases are zero unless output.seed is non-zero.
struct InitialCondition {
  double rho0 = 1.0;
  double theta0 = 1.0;
  double rho_amplitude = 0.0;
  double theta_amplitude = 0.0;
  std::vector<int> rho_modes{1};
  std::vector<int> theta_modes{1};
  WaveShape rho_shape = WaveShape::Sin;
  WaveShape theta_shape = WaveShape::Cos;
  bool operator==(const InitialCondition&) const = default;
};

struct OutputConfig {
  std::string directory = "output";
  std::size_t stride = 100;
  bool snapshots = false;
  std::uint64_t seed = 0;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ModelParams model;
  GridConfig grid;
  InitialCondition initial;
  SolverConfig solver;  // solver.output_stride mirrors output.stride
  OutputConfig output;
  bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Raw document

struct ConfigEntry {
  std::string value;
  int line = 0;  // 0 for entries set programmatically
};

/// Sections of key/value entries as written, before interpretation.
struct ConfigDocument {
  std::map<std::string, std::map<std::string, ConfigEntry>> sections;

  void set(const std::string& section, const std::string& key, const std::string& value) {
    sections[section][key] = {value, 0};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string where(const std::string& section, const std::string& key, int line) {
  std::string out = line > 0 ? "line " + std::to_string(line) + ": " : std::string{};
  return out + "[" + section + "] " + key + ": ";
}

}  // namespace detail

inline ConfigDocument parse_document(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header '" + line + "'");
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      if (doc.sections.count(section) != 0) {
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate section [" + section + "]");
      }
      doc.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key outside of any section");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    auto& entries = doc.sections[section];
    if (entries.count(key) != 0) {
      throw ConfigError(detail::where(section, key, line_no) + "duplicate key (first on line " +
                        std::to_string(entries[key].line) + ")");
    }
    entries[key] = {value, line_no};
  }
  return doc;
}

namespace detail {

// Reads typed values out of a document and remembers which keys were used.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigDocument& doc) : doc_(doc) {}

  const ConfigEntry* find(const std::string& section, const std::string& key) {
    used_.insert({section, key});
    auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = doc_.sections.find(section);
    return s != doc_.sections.end() && s->second.count(key) != 0;
  }

  int line(const std::string& section, const std::string& key) const {
    auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return 0;
    auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.line;
  }

  const ConfigEntry& require(const std::string& section, const std::string& key) {
    const ConfigEntry* e = find(section, key);
    if (e == nullptr) throw ConfigError(where(section, key, 0) + "missing required key");
    return *e;
  }

  double number(const std::string& section, const std::string& key, std::optional<double> fallback) {
    const ConfigEntry* e = fallback ? find(section, key) : &require(section, key);
    if (e == nullptr) return *fallback;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(e->value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != e->value.size() || !std::isfinite(v)) {
      throw ConfigError(where(section, key, e->line) + "expected a finite number, got '" + e->value + "'");
    }
    return v;
  }

  long long integer(const std::string& section, const std::string& key, std::optional<long long> fallback) {
    const ConfigEntry* e = fallback ? find(section, key) : &require(section, key);
    if (e == nullptr) return *fallback;
    return parse_integer(section, key, *e, e->value);
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) {
    const ConfigEntry* e = find(section, key);
    if (e == nullptr) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    throw ConfigError(where(section, key, e->line) + "expected true or false, got '" + e->value + "'");
  }

  std::string text(const std::string& section, const std::string& key, std::optional<std::string> fallback) {
    const ConfigEntry* e = fallback ? find(section, key) : &require(section, key);
    if (e == nullptr) return *fallback;
    return e->value;
  }

  std::vector<int> modes(const std::string& section, const std::string& key, std::vector<int> fallback) {
    const ConfigEntry* e = find(section, key);
    if (e == nullptr) return fallback;
    std::vector<int> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const long long k = parse_integer(section, key, *e, trim(item));
      if (k < 1 || k > 1000000) {
        throw ConfigError(where(section, key, e->line) + "mode numbers must be positive integers");
      }
      out.push_back(static_cast<int>(k));
    }
    if (out.empty()) throw ConfigError(where(section, key, e->line) + "empty mode list");
    return out;
  }

  /// Any key present in the document but never asked for.
  void reject_unused() const {
    for (const auto& [section, entries] : doc_.sections) {
      for (const auto& [key, entry] : entries) {
        if (used_.count({section, key}) == 0) {
          const bool known_section = section == "model" || section == "grid" || section == "initial" ||
                                     section == "solver" || section == "output";
          throw ConfigError(where(section, key, entry.line) +
                            (known_section ? "unknown or inapplicable key" : "unknown section"));
        }
      }
    }
  }

  /// Keys not applicable to the chosen variant are rejected even if well formed.
  void forbid(const std::string& section, const std::string& key, const std::string& reason) {
    if (has(section, key)) {
      throw ConfigError(where(section, key, line(section, key)) + "not allowed " + reason);
    }
    used_.insert({section, key});
  }

 private:
  static long long parse_integer(const std::string& section, const std::string& key,
                                 const ConfigEntry& e, const std::string& value) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != value.size()) {
      throw ConfigError(where(section, key, e.line) + "expected an integer, got '" + value + "'");
    }
    return v;
  }

  const ConfigDocument& doc_;
  std::set<std::pair<std::string, std::string>> used_;
};

inline WaveShape parse_shape(const std::string& section, const std::string& key, const std::string& v,
                             int line) {
  if (v == "sin") return WaveShape::Sin;
  if (v == "cos") return WaveShape::Cos;
  throw ConfigError(where(section, key, line) + "expected sin or cos, got '" + v + "'");
}

// Wraps a model/solver invariant failure with the key it concerns.
template <class Fn>
void with_context(const std::string& section, const std::string& key, int line, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(where(section, key, line) + e.what());
  }
}

}  // namespace detail

inline RunConfig build_config(const ConfigDocument& doc) {
  detail::ConfigReader rd(doc);
  RunConfig cfg;

  // [model]
  const std::string kind = rd.text("model", "kind", std::nullopt);
  ModelParams& m = cfg.model;
  if (kind == "ideal_gas") {
    m.kind = ModelKind::IdealGas;
  } else if (kind == "porous_media") {
    m.kind = ModelKind::PorousMedia;
  } else if (kind == "generalized_pm") {
    m.kind = ModelKind::GeneralizedPM;
  } else {
    throw ConfigError(detail::where("model", "kind", rd.line("model", "kind")) +
                      "expected ideal_gas, porous_media or generalized_pm, got '" + kind + "'");
  }
  m.kappa1 = rd.number("model", "kappa1", std::nullopt);
  m.kappa2 = rd.number("model", "kappa2", std::nullopt);
  if (m.uses_alpha()) {
    m.alpha = rd.number("model", "alpha", std::nullopt);
  } else {
    rd.forbid("model", "alpha", "for the ideal gas model");
  }
  if (m.kind == ModelKind::GeneralizedPM) {
    m.beta_exp = rd.number("model", "beta", std::nullopt);
  } else {
    rd.forbid("model", "beta", "outside the generalized_pm model");
  }
  const char* default_law = m.kind == ModelKind::IdealGas      ? "ideal_gas_law"
                            : m.kind == ModelKind::PorousMedia ? "pm_law"
                                                               : "constant";
  const std::string law = rd.text("model", "conductivity", std::string(default_law));
  if (law == "ideal_gas_law") {
    m.conductivity = IdealGasLaw{rd.number("model", "d_tilde", std::nullopt)};
    rd.forbid("model", "d", "with ideal_gas_law conductivity");
    rd.forbid("model", "k", "with ideal_gas_law conductivity");
  } else if (law == "pm_law") {
    m.conductivity = PMLaw{rd.number("model", "d", std::nullopt)};
    rd.forbid("model", "d_tilde", "with pm_law conductivity");
    rd.forbid("model", "k", "with pm_law conductivity");
  } else if (law == "constant") {
    m.conductivity = ConstantConductivity{rd.number("model", "k", std::nullopt)};
    rd.forbid("model", "d_tilde", "with constant conductivity");
    rd.forbid("model", "d", "with constant conductivity");
  } else {
    throw ConfigError(detail::where("model", "conductivity", rd.line("model", "conductivity")) +
                      "expected ideal_gas_law, pm_law or constant, got '" + law + "'");
  }
  try {
    m.validate();
  } catch (const ConfigError& e) {
    // Messages lead with the offending parameter, e.g. "alpha > 1 required".
    const std::string msg = e.what();
    std::string key = msg.substr(0, msg.find(' '));
    if (key == "conductivity") key = "k";
    throw ConfigError(detail::where("model", key, rd.line("model", key)) + msg);
  }

  // [grid]
  cfg.grid.dim = static_cast<int>(rd.integer("grid", "dim", 1));
  cfg.grid.n = static_cast<int>(rd.integer("grid", "n", std::nullopt));
  cfg.grid.length = rd.number("grid", "length", 1.0);
  detail::with_context("grid", "n", rd.line("grid", "n"), [&] { cfg.grid.make(); });

  // [initial]
  InitialCondition& ic = cfg.initial;
  ic.rho0 = rd.number("initial", "rho0", 1.0);
  ic.theta0 = rd.number("initial", "theta0", 1.0);
  ic.rho_amplitude = rd.number("initial", "rho_amplitude", 0.0);
  ic.theta_amplitude = rd.number("initial", "theta_amplitude", 0.0);
  ic.rho_modes = rd.modes("initial", "rho_modes", {1});
  ic.theta_modes = rd.modes("initial", "theta_modes", {1});
  ic.rho_shape = detail::parse_shape("initial", "rho_shape", rd.text("initial", "rho_shape", "sin"),
                                     rd.line("initial", "rho_shape"));
  ic.theta_shape = detail::parse_shape("initial", "theta_shape", rd.text("initial", "theta_shape", "cos"),
                                       rd.line("initial", "theta_shape"));
  auto require_positive = [&](const char* key, double v) {
    if (!(v > 0.0)) throw ConfigError(detail::where("initial", key, rd.line("initial", key)) + "must be > 0");
  };
  auto require_amplitude = [&](const char* key, double v) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw ConfigError(detail::where("initial", key, rd.line("initial", key)) + "amplitude must lie in [0, 1)");
    }
  };
  require_positive("rho0", ic.rho0);
  require_positive("theta0", ic.theta0);
  require_amplitude("rho_amplitude", ic.rho_amplitude);
  require_amplitude("theta_amplitude", ic.theta_amplitude);

  // [output]
  cfg.output.directory = rd.text("output", "directory", std::string("output"));
  const long long stride = rd.integer("output", "stride", 100);
  if (stride < 1) {
    throw ConfigError(detail::where("output", "stride", rd.line("output", "stride")) + "must be at least 1");
  }
  cfg.output.stride = static_cast<std::size_t>(stride);
  cfg.output.snapshots = rd.boolean("output", "snapshots", false);
  const long long seed = rd.integer("output", "seed", 0);
  if (seed < 0) throw ConfigError(detail::where("output", "seed", rd.line("output", "seed")) + "must be >= 0");
  cfg.output.seed = static_cast<std::uint64_t>(seed);

  // [solver]
  SolverConfig& sc = cfg.solver;
  sc.dt_safety = rd.number("solver", "dt_safety", 0.5);
  sc.t_end = rd.number("solver", "t_end", std::nullopt);
  const std::string integrator = rd.text("solver", "integrator", std::string("rk2"));
  if (integrator == "rk2") {
    sc.integrator = Integrator::RK2;
  } else if (integrator == "euler") {
    sc.integrator = Integrator::Euler;
  } else {
    throw ConfigError(detail::where("solver", "integrator", rd.line("solver", "integrator")) +
                      "expected euler or rk2, got '" + integrator + "'");
  }
  sc.abort_on_nonpositive_theta = rd.boolean("solver", "abort_on_nonpositive_theta", true);
  sc.output_stride = cfg.output.stride;
  detail::with_context("solver", "t_end", rd.line("solver", "t_end"), [&] { sc.validate(); });
  if (!(sc.t_end > 0.0)) {
    throw ConfigError(detail::where("solver", "t_end", rd.line("solver", "t_end")) + "must be > 0");
  }

  rd.reject_unused();
  return cfg;
}

inline RunConfig parse_config(const std::string& text) { return build_config(parse_document(text)); }

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

inline std::string serialize_config(const RunConfig& cfg) {
  using detail::format_double;
  auto modes = [](const std::vector<int>& ks) {
    std::string out;
    for (int k : ks) out += (out.empty() ? "" : ",") + std::to_string(k);
    return out;
  };
  auto shape = [](WaveShape s) { return s == WaveShape::Sin ? "sin" : "cos"; };
  const ModelParams& m = cfg.model;
  std::ostringstream os;
  os << "[model]\n"
     << "kind = " << to_string(m.kind) << "\n"
     << "kappa1 = " << format_double(m.kappa1) << "\n"
     << "kappa2 = " << format_double(m.kappa2) << "\n";
  if (m.uses_alpha()) os << "alpha = " << format_double(m.alpha) << "\n";
  if (m.kind == ModelKind::GeneralizedPM) os << "beta = " << format_double(m.beta_exp) << "\n";
  if (const auto* c = std::get_if<IdealGasLaw>(&m.conductivity)) {
    os << "conductivity = ideal_gas_law\nd_tilde = " << format_double(c->d_tilde) << "\n";
  } else if (const auto* c = std::get_if<PMLaw>(&m.conductivity)) {
    os << "conductivity = pm_law\nd = " << format_double(c->d) << "\n";
  } else if (const auto* c = std::get_if<ConstantConductivity>(&m.conductivity)) {
    os << "conductivity = constant\nk = " << format_double(c->k) << "\n";
  }
  const InitialCondition& ic = cfg.initial;
  os << "\n[grid]\n"
     << "dim = " << cfg.grid.dim << "\n"
     << "n = " << cfg.grid.n << "\n"
     << "length = " << format_double(cfg.grid.length) << "\n"
     << "\n[initial]\n"
     << "rho0 = " << format_double(ic.rho0) << "\n"
     << "theta0 = " << format_double(ic.theta0) << "\n"
     << "rho_amplitude = " << format_double(ic.rho_amplitude) << "\n"
     << "theta_amplitude = " << format_double(ic.theta_amplitude) << "\n"
     << "rho_modes = " << modes(ic.rho_modes) << "\n"
     << "theta_modes = " << modes(ic.theta_modes) << "\n"
     << "rho_shape = " << shape(ic.rho_shape) << "\n"
     << "theta_shape = " << shape(ic.theta_shape) << "\n"
     << "\n[solver]\n"
     << "dt_safety = " << format_double(cfg.solver.dt_safety) << "\n"
     << "t_end = " << format_double(cfg.solver.t_end) << "\n"
     << "integrator = " << (cfg.solver.integrator == Integrator::RK2 ? "rk2" : "euler") << "\n"
     << "abort_on_nonpositive_theta = " << (cfg.solver.abort_on_nonpositive_theta ? "true" : "false") << "\n"
     << "\n[output]\n"
     << "directory = " << cfg.output.directory << "\n"
     << "stride = " << cfg.output.stride << "\n"
     << "snapshots = " << (cfg.output.snapshots ? "true" : "false") << "\n"
     << "seed = " << cfg.output.seed << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Initial data

namespace detail {

// splitmix64: a fixed, platform-independent sequence for the phases.
inline double unit_random(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

inline ScalarField perturbed(const PeriodicGrid& g, double base, double amplitude,
                             const std::vector<int>& modes, WaveShape shape,
                             const std::vector<double>& phases) {
  const double two_pi_over_l = 2.0 * std::numbers::pi / g.length();
  return ScalarField::sample(g, [&](double x, double y) {
    const double s = g.dim() == 2 ? x + y : x;
    double phi = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const double arg = two_pi_over_l * modes[j] * s + phases[j];
      phi += shape == WaveShape::Sin ? std::sin(arg) : std::cos(arg);
    }
    return base * (1.0 + amplitude * phi / static_cast<double>(modes.size()));
  });
}

}  // namespace detail

/// Initial (rho, w) at t = 0 from the [initial] block.
inline SimState initial_state(const RunConfig& cfg) {
  const PeriodicGrid g = cfg.grid.make();
  const InitialCondition& ic = cfg.initial;
  std::uint64_t rng = cfg.output.seed;
  auto phases = [&](std::size_t count) {
    std::vector<double> out(count, 0.0);
    if (cfg.output.seed != 0) {
      for (auto& p : out) p = 2.0 * std::numbers::pi * detail::unit_random(rng);
    }
    return out;
  };
  const auto rho_phases = phases(ic.rho_modes.size());
  const auto theta_phases = phases(ic.theta_modes.size());
  const ScalarField rho = detail::perturbed(g, ic.rho0, ic.rho_amplitude, ic.rho_modes, ic.rho_shape, rho_phases);
  const ScalarField theta =
      detail::perturbed(g, ic.theta0, ic.theta_amplitude, ic.theta_modes, ic.theta_shape, theta_phases);
  return make_state(cfg.model, rho, theta);
}

}  // namespace thermoflux
