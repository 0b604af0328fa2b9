#pragma once

// Subcommand implementations for the thermoflux tool. Each returns the
// process exit code: 0 success, 1 usage or configuration error, 2 numerical
// abort, 3 invariant-suite failure.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "thermoflux/aux_analysis.hpp"
#include "thermoflux/config.hpp"
#include "thermoflux/diagnostics.hpp"
#include "thermoflux/invariants.hpp"
#include "thermoflux/pde_solver.hpp"

namespace thermoflux {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitInvariant = 3;

inline constexpr const char* kOutputDirEnv = "THERMOFLUX_OUTPUT_DIR";

/// THERMOFLUX_OUTPUT_DIR if set and non-empty, else `fallback`.
inline std::string output_directory(const std::string& fallback) {
  const char* env = std::getenv(kOutputDirEnv);
  return env != nullptr && *env != '\0' ? std::string(env) : fallback;
}

struct SimulationOutcome {
  RunResult result;
  std::size_t records = 0;
  std::vector<std::string> flags;  // distinct flags seen, in first-seen order
};

/// Runs one configured simulation, writing diagnostics.csv, the resolved
/// config and (optionally) snapshots into `dir`.
inline SimulationOutcome run_simulation(const RunConfig& cfg, const std::filesystem::path& dir,
                                        std::shared_ptr<const PMMonitorData> pm = nullptr) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream resolved(dir / "config.ini");
    resolved << serialize_config(cfg);
  }
  std::ofstream csv(dir / "diagnostics.csv");
  if (!csv) throw Error("cannot write " + (dir / "diagnostics.csv").string());
  write_csv_header(csv);

  const bool pm_monitor = cfg.model.kind == ModelKind::PorousMedia &&
                          std::holds_alternative<PMLaw>(cfg.model.conductivity);
  DiagnosticsMonitor monitor = pm_monitor && pm ? DiagnosticsMonitor(cfg.model, cfg.solver.t_end, pm)
                                                : DiagnosticsMonitor(cfg.model, cfg.solver.t_end);
  std::size_t records = 0;
  std::vector<std::string> flags;
  std::size_t frame = 0;
  RunResult result = run(cfg.model, initial_state(cfg), cfg.solver, [&](const SimState& s, const StepInfo& info) {
    const DiagnosticsRecord rec = monitor.record(s, info);
    write_csv_row(csv, rec);
    ++records;
    for (const auto& f : rec.flags) {
      if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
    }
    if (cfg.output.snapshots) {
      std::ostringstream suffix;
      suffix << std::setw(6) << std::setfill('0') << frame++;
      write_snapshot((dir / ("rho_" + suffix.str())).string(), s.rho, s.t, "rho");
      write_snapshot((dir / ("theta_" + suffix.str())).string(), recover_theta(cfg.model, s), s.t, "theta");
    }
  });
  return {std::move(result), records, std::move(flags)};
}

inline int exit_code_for(RunStatus s) { return s == RunStatus::Completed ? kExitOk : kExitNumerical; }

// ---------------------------------------------------------------------------
// run

inline int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "error: " << config_path << ": " << e.what() << "\n";
    return kExitUsage;
  }
  const std::filesystem::path dir = output_directory(cfg.output.directory);
  try {
    const SimulationOutcome o = run_simulation(cfg, dir);
    out << "status = " << to_string(o.result.status) << "\n"
        << "t = " << detail::format_double(o.result.state.t) << "\n"
        << "steps = " << o.result.steps << "\n"
        << "records = " << o.records << "\n"
        << "flags = " << join_flags(o.flags) << "\n"
        << "output = " << (dir / "diagnostics.csv").string() << "\n";
    if (o.result.status != RunStatus::Completed) err << "aborted: " << o.result.message << "\n";
    return exit_code_for(o.result.status);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::string model = "ideal_gas";
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  std::optional<double> d_tilde;
  std::optional<double> d;
  std::optional<double> alpha;
  ThresholdScanOptions scan;
  std::size_t table_points = 121;
  std::optional<std::string> out_dir;
};

namespace detail {

inline void write_weight_csv(const std::filesystem::path& path, const WeightTable& tab, const PMBranchParams& p) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << "rho,f,psi,gtilde\n";
  for (std::size_t i = 0; i < tab.size(); ++i) {
    const double f = tab.f(i);
    os << format_double(tab.rho[i]) << ',' << format_double(f) << ',' << format_double(tab.psi[i]) << ','
       << format_double(f * gtilde_pm(tab.branch, tab.rho[i], p)) << '\n';
  }
}

}  // namespace detail

inline int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  using detail::format_double;
  try {
    if (opt.model == "ideal_gas") {
      if (!opt.d_tilde) throw ConfigError("--dtilde is required for the ideal gas model");
      if (opt.d || opt.alpha) throw ConfigError("--d and --alpha apply to porous_media only");
      const auto ex = gamma_exponents(opt.kappa1, opt.kappa2, *opt.d_tilde);
      const auto signs = gtilde_ideal_signs(ex);
      out << "model = ideal_gas\n"
          << "beta = " << format_double(ex.beta) << "\n"
          << "d_tilde = " << format_double(ex.d_tilde) << "\n"
          << "gamma_plus = " << format_double(ex.gamma_plus) << "\n"
          << "gamma_minus = " << format_double(ex.gamma_minus) << "\n"
          << "disc = " << format_double(ex.disc) << "\n"
          << "c_plus = " << format_double(ex.c_plus) << "\n"
          << "c_minus = " << format_double(ex.c_minus) << "\n"
          << "sign_plus = " << signs.sign_plus << "\n"
          << "sign_minus = " << signs.sign_minus << "\n";
      return kExitOk;
    }
    if (opt.model != "porous_media") {
      throw ConfigError("--model must be ideal_gas or porous_media, got '" + opt.model + "'");
    }
    if (!opt.d || !opt.alpha) throw ConfigError("--d and --alpha are required for porous_media");
    if (opt.d_tilde) throw ConfigError("--dtilde applies to the ideal gas model only");
    const auto model = ModelParams::porous_media(opt.kappa1, opt.kappa2, *opt.alpha, PMLaw{*opt.d});
    const auto p = PMBranchParams::from_model(model);
    out << "model = porous_media\n"
        << "a = " << format_double(p.a) << "\n"
        << "kappa2 = " << format_double(p.kappa2) << "\n"
        << "d_rescaled = " << format_double(p.d) << "\n"
        << "rho_scale = " << format_double(rescale_density(model, 1.0)) << "\n"
        << "rho1 = " << format_double(plus_branch_minimum(p)) << "\n";
    Thresholds th;
    try {
      th = find_thresholds(p, opt.scan);
    } catch (const ThresholdNotFound& e) {
      err << "error: " << e.what() << "\nsign profile:";
      for (std::size_t i = 0; i < e.rho().size(); ++i) err << ' ' << e.signs()[i];
      err << "\n";
      return kExitNumerical;
    }
    out << "rho_under = " << format_double(th.rho_under) << "\n"
        << "rho_bar = " << format_double(th.rho_bar) << "\n"
        << "zeros = " << th.zeros.size() << "\n"
        << "g_minus_positive = " << (th.g_minus_positive ? "true" : "false") << "\n";

    const std::optional<std::string> dir =
        opt.out_dir ? opt.out_dir
                    : (std::getenv(kOutputDirEnv) ? std::optional<std::string>(output_directory("")) : std::nullopt);
    if (dir && !dir->empty()) {
      const std::filesystem::path base(*dir);
      std::filesystem::create_directories(base);
      const auto rho = log_space(opt.scan.rho_min, opt.scan.rho_max, opt.table_points);
      detail::write_weight_csv(base / "weight_plus.csv", weight_function(Branch::Plus, p, 1.0, 1.0, rho), p);
      detail::write_weight_csv(base / "weight_minus.csv", weight_function(Branch::Minus, p, 1.0, 1.0, rho), p);
      std::ofstream scan(base / "gtilde_scan.csv");
      scan << "rho,gtilde_plus,gtilde_minus\n";
      for (double r : th.scan_rho) {
        scan << format_double(r) << ',' << format_double(gtilde_pm(Branch::Plus, r, p)) << ','
             << format_double(gtilde_pm(Branch::Minus, r, p)) << '\n';
      }
      out << "tables = " << base.string() << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepAxis {
  std::string section;
  std::string key;
  std::vector<std::string> values;
};

/// Parses "section.key=v1,v2,...".
inline SweepAxis parse_sweep_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  const auto dot = spec.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 || dot + 1 == eq) {
    throw ConfigError("--vary expects section.key=v1,v2,..., got '" + spec + "'");
  }
  SweepAxis axis{spec.substr(0, dot), spec.substr(dot + 1, eq - dot - 1), {}};
  std::stringstream ss(spec.substr(eq + 1));
  std::string v;
  while (std::getline(ss, v, ',')) {
    v = detail::trim(v);
    if (v.empty()) throw ConfigError("--vary '" + spec + "' has an empty value");
    axis.values.push_back(v);
  }
  if (axis.values.empty()) throw ConfigError("--vary '" + spec + "' lists no values");
  return axis;
}

struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> assignments;  // "section.key", value
  std::string directory;
  RunConfig config;
};

/// Cartesian product of the axes, first axis slowest. Every point is fully
/// validated before anything runs.
inline std::vector<SweepPoint> expand_sweep(const ConfigDocument& base, const std::vector<SweepAxis>& axes) {
  std::vector<SweepPoint> points;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    ConfigDocument doc = base;
    SweepPoint p;
    std::string name;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& ax = axes[a];
      const std::string& v = ax.values[idx[a]];
      doc.set(ax.section, ax.key, v);
      p.assignments.emplace_back(ax.section + "." + ax.key, v);
      if (!name.empty()) name += "__";
      name += ax.section + "." + ax.key + "=" + v;
    }
    for (char& c : name) {
      if (c == '/' || c == '\\' || c == ' ') c = '_';
    }
    p.directory = name.empty() ? "point" : name;
    try {
      p.config = build_config(doc);
    } catch (const ConfigError& e) {
      throw ConfigError("sweep point " + p.directory + ": " + e.what());
    }
    points.push_back(std::move(p));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return points;
    }
    if (axes.empty()) return points;
  }
}

inline int cmd_sweep(const std::string& config_path, const std::vector<std::string>& vary, unsigned jobs,
                     std::ostream& out, std::ostream& err) {
  std::vector<SweepPoint> points;
  std::filesystem::path base_dir;
  try {
    const ConfigDocument doc = parse_document(read_text_file(config_path));
    const RunConfig base = build_config(doc);
    base_dir = output_directory(base.output.directory);
    std::vector<SweepAxis> axes;
    for (const auto& v : vary) axes.push_back(parse_sweep_axis(v));
    if (axes.empty()) throw ConfigError("sweep needs at least one --vary");
    points = expand_sweep(doc, axes);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(points.size()));

  struct Outcome {
    int code = kExitOk;
    std::string status;
  };
  std::vector<Outcome> outcomes(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const auto o = run_simulation(points[i].config, base_dir / points[i].directory);
        outcomes[i] = {exit_code_for(o.result.status), to_string(o.result.status)};
      } catch (const ConfigError& e) {
        outcomes[i] = {kExitUsage, std::string("error: ") + e.what()};
      } catch (const std::exception& e) {
        outcomes[i] = {kExitNumerical, std::string("error: ") + e.what()};
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(base_dir);
  std::ofstream summary(base_dir / "sweep.csv");
  summary << "point,directory,status\n";
  int code = kExitOk;
  for (std::size_t i = 0; i < points.size(); ++i) {
    summary << i << ',' << points[i].directory << ',' << outcomes[i].status << '\n';
    out << points[i].directory << ": " << outcomes[i].status << "\n";
    code = std::max(code, outcomes[i].code);
  }
  return code;
}

// ---------------------------------------------------------------------------
// check

inline int cmd_check(std::ostream& out) {
  int failed = 0;
  const auto results = run_invariant_suite();
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.module << ": " << r.name << " (" << r.detail << ")\n";
    if (!r.passed) ++failed;
  }
  out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " invariants hold\n";
  return failed == 0 ? kExitOk : kExitInvariant;
}

}  // namespace thermoflux
