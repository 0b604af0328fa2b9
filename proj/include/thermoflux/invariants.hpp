#pragma once

// Built-in invariant suite behind `thermoflux check`: every module's
// properties evaluated on small fixtures.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thermoflux/aux_analysis.hpp"
#include "thermoflux/config.hpp"
#include "thermoflux/diagnostics.hpp"
#include "thermoflux/grid.hpp"
#include "thermoflux/pde_solver.hpp"
#include "thermoflux/thermo_models.hpp"

namespace thermoflux {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string describe(double value) { return format_double(value); }

inline std::vector<ModelParams> sample_models() {
  return {ModelParams::ideal_gas(1.0, 1.0, IdealGasLaw{1.0}),
          ModelParams::ideal_gas(0.7, 1.9, ConstantConductivity{0.5}),
          ModelParams::porous_media(1.0, 1.0, 2.0, PMLaw{1.0}),
          ModelParams::porous_media(0.8, 1.3, 2.5, ConstantConductivity{0.4}),
          ModelParams::generalized_pm(1.0, 1.0, 2.0, 2.0, ConstantConductivity{1.0})};
}

inline SimState wavy_state(const ModelParams& m, const PeriodicGrid& g, double amp) {
  const double k = 2.0 * std::numbers::pi / g.length();
  auto rho = ScalarField::sample(g, [&](double x, double y) { return 1.0 + amp * std::sin(k * (x + 0.5 * y)); });
  auto theta = ScalarField::sample(g, [&](double x, double y) { return 1.0 + amp * std::cos(k * (x - y)); });
  return make_state(m, rho, theta);
}

inline SimState run_fixed(const ModelParams& m, SimState s, double dt, int steps, Integrator integ) {
  for (int i = 0; i < steps; ++i) s = step(m, s, dt, integ);
  return s;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace detail

inline std::vector<CheckResult> run_invariant_suite() {
  std::vector<CheckResult> out;
  auto check = [&](const char* module, const char* name, const std::function<std::string()>& body) {
    CheckResult r{module, name, false, {}};
    try {
      r.detail = body();
      r.passed = r.detail.rfind("FAIL", 0) != 0;
    } catch (const std::exception& e) {
      r.detail = std::string("FAIL exception: ") + e.what();
    }
    out.push_back(std::move(r));
  };
  auto verdict = [](bool ok, const std::string& what) { return (ok ? "" : "FAIL ") + what; };
  std::mt19937_64 gen(20240601);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); };

  // thermo_models ----------------------------------------------------------
  check("thermo_models", "internal energy e = psi + eta theta", [&] {
    double worst = 0.0;
    for (const auto& m : detail::sample_models()) {
      for (int i = 0; i < 200; ++i) {
        const double r = uniform(0.1, 10.0);
        const double t = uniform(0.1, 10.0);
        const auto tp = eval_thermo(m, r, t);
        const double ref = tp.psi + tp.eta * t;
        worst = std::max(worst, std::abs(tp.e - ref) / std::max(1.0, std::abs(ref)));
      }
    }
    return verdict(worst <= 1e-12, "max relative error " + detail::describe(worst));
  });
  check("thermo_models", "entropy, pressure and dp/dtheta against finite differences", [&] {
    const double eps = 1e-5;
    double worst = 0.0;
    for (const auto& m : detail::sample_models()) {
      for (int i = 0; i < 100; ++i) {
        const double r = uniform(0.1, 10.0);
        const double t = uniform(0.1, 10.0);
        const auto tp = eval_thermo(m, r, t);
        const double eta_fd = -(free_energy(m, r, t + eps) - free_energy(m, r, t - eps)) / (2 * eps);
        const double psi_r = (free_energy(m, r + eps, t) - free_energy(m, r - eps, t)) / (2 * eps);
        const double eta_r = (eval_thermo(m, r + eps, t).eta - eval_thermo(m, r - eps, t).eta) / (2 * eps);
        const double eta_t = (eval_thermo(m, r, t + eps).eta - eval_thermo(m, r, t - eps).eta) / (2 * eps);
        const double scale = 1.0 + std::abs(tp.psi) + std::abs(tp.p);
        worst = std::max({worst, std::abs(tp.eta - eta_fd) / scale,
                          std::abs(tp.p - (psi_r * r - tp.psi)) / scale,
                          std::abs(tp.dp_dtheta - (tp.eta - eta_r * r)) / scale,
                          std::abs(tp.eta_theta - eta_t) / (1.0 + std::abs(tp.eta_theta))});
      }
    }
    return verdict(worst <= 1e-6, "max scaled error " + detail::describe(worst));
  });

  // grid_core ----------------------------------------------------------------
  check("grid_core", "discrete divergence theorem and self-adjointness", [&] {
    double div = 0.0;
    double sym = 0.0;
    for (int dim = 1; dim <= 2; ++dim) {
      PeriodicGrid g(dim, 16, 1.3);
      auto rnd = [&] { return ScalarField::sample(g, [&](double) { return uniform(0.5, 2.0); }); };
      const auto a = rnd();
      const auto b = rnd();
      const auto c = rnd();
      div = std::max(div, std::abs(total(div_a_grad_b(a, b))));
      const auto ab = div_a_grad_b(a, b);
      const auto ac = div_a_grad_b(a, c);
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        s1 += b[i] * ac[i];
        s2 += c[i] * ab[i];
      }
      sym = std::max(sym, std::abs(s1 - s2));
    }
    return verdict(div <= 1e-12 && sym <= 1e-10,
                   "|total| " + detail::describe(div) + ", symmetry gap " + detail::describe(sym));
  });
  check("grid_core", "second-order convergence of laplacian and gradient", [&] {
    std::vector<double> lap_err, grad_err;
    for (int n : {32, 64, 128, 256}) {
      PeriodicGrid g(1, n, 1.0);
      const double k = 2.0 * std::numbers::pi;
      const auto f = ScalarField::sample(g, [&](double x) { return std::sin(k * x); });
      const auto lap = laplacian(f);
      const auto grad = gradient(f);
      double el = 0.0, eg = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(i, 0);
        el = std::max(el, std::abs(lap[i] + k * k * std::sin(k * x)));
        eg = std::max(eg, std::abs(grad[0][i] - k * std::cos(k * x)));
      }
      lap_err.push_back(el);
      grad_err.push_back(eg);
    }
    bool ok = true;
    std::ostringstream os;
    os << "ratios";
    for (std::size_t i = 0; i + 1 < lap_err.size(); ++i) {
      const double rl = lap_err[i] / lap_err[i + 1];
      const double rg = grad_err[i] / grad_err[i + 1];
      ok = ok && rl >= 3.5 && rl <= 4.5 && rg >= 3.5 && rg <= 4.5;
      os << " " << rl << "/" << rg;
    }
    return verdict(ok, os.str());
  });

  // pde_solver ---------------------------------------------------------------
  check("pde_solver", "conservation of total(rho) and total(w) over 1000 steps", [&] {
    double worst = 0.0;
    for (const auto& m : detail::sample_models()) {
      PeriodicGrid g(1, 32, 1.0);
      SimState s = detail::wavy_state(m, g, 0.2);
      const double m0 = total(s.rho);
      const double w0 = total(s.w);
      const double dt = stable_dt(m, s, 0.5);
      s = detail::run_fixed(m, s, dt, 1000, Integrator::RK2);
      worst = std::max({worst, std::abs(total(s.rho) - m0) / m0, std::abs(total(s.w) - w0) / w0});
    }
    return verdict(worst <= 1e-11, "max relative drift " + detail::describe(worst));
  });
  check("pde_solver", "uniform data stays uniform", [&] {
    double worst = 0.0;
    for (const auto& m : detail::sample_models()) {
      PeriodicGrid g(2, 8, 1.0);
      SimState s = make_state(m, ScalarField(g, 1.7), ScalarField(g, 0.6));
      const SimState s0 = s;
      s = detail::run_fixed(m, s, stable_dt(m, s, 0.5), 50, Integrator::RK2);
      worst = std::max({worst, detail::max_abs_diff(s.rho, s0.rho), detail::max_abs_diff(s.w, s0.w)});
    }
    return verdict(worst <= 1e-13, "max deviation " + detail::describe(worst));
  });
  check("pde_solver", "RK2 second-order and Euler first-order self-convergence", [&] {
    const auto m = ModelParams::ideal_gas(1.0, 1.0, IdealGasLaw{1.0});
    PeriodicGrid g(1, 32, 1.0);
    const SimState s0 = detail::wavy_state(m, g, 0.1);
    const double t_end = 0.01;
    const double dt0 = t_end / 128.0;
    const auto ref = detail::run_fixed(m, s0, dt0 / 64.0, 128 * 64, Integrator::RK2);
    auto order = [&](Integrator integ) {
      const double e1 = detail::max_abs_diff(detail::run_fixed(m, s0, dt0, 128, integ).rho, ref.rho);
      const double e2 = detail::max_abs_diff(detail::run_fixed(m, s0, dt0 / 2, 256, integ).rho, ref.rho);
      return std::log2(e1 / e2);
    };
    const double rk2 = order(Integrator::RK2);
    const double euler = order(Integrator::Euler);
    return verdict(rk2 >= 1.8 && rk2 <= 2.2 && euler >= 0.8 && euler <= 1.2,
                   "orders RK2 " + detail::describe(rk2) + ", Euler " + detail::describe(euler));
  });
  check("pde_solver", "gradients decay over the final half of a relaxation run", [&] {
    const auto m = ModelParams::ideal_gas(1.0, 1.0, IdealGasLaw{1.0});
    PeriodicGrid g(1, 32, 1.0);
    SolverConfig cfg;
    cfg.t_end = 0.05;
    cfg.output_stride = 20;
    std::vector<std::pair<double, double>> norms;
    run(m, detail::wavy_state(m, g, 0.05), cfg, [&](const SimState& s, const StepInfo&) {
      const auto theta = recover_theta(m, s);
      const auto gr = gradient(s.rho);
      const auto gt = gradient(theta);
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        a += norm_squared(gr, i);
        b += norm_squared(gt, i);
      }
      norms.emplace_back(a, b);
    });
    bool ok = true;
    for (std::size_t i = norms.size() / 2; i + 1 < norms.size(); ++i) {
      ok = ok && norms[i + 1].first <= norms[i].first && norms[i + 1].second <= norms[i].second;
    }
    return verdict(ok, std::to_string(norms.size()) + " samples");
  });

  // aux_analysis -------------------------------------------------------------
  check("aux_analysis", "ideal-gas exponent algebra and sign constants", [&] {
    double res = 0.0, prod = 0.0, sum = 0.0, disc = 0.0;
    bool ordered = true;
    for (int i = 0; i < 1000; ++i) {
      const double k2 = uniform(0.1, 10.0);
      const double beta = uniform(1.0 + 1e-9, 10.0);
      const double d = uniform(1e-9, 10.0);
      const auto ex = gamma_exponents((beta - 1.0) * k2, k2, d);
      gtilde_ideal_signs(ex);
      const double s = ex.beta + d;
      for (double g : {ex.gamma_plus, ex.gamma_minus}) {
        res = std::max(res, std::abs(g * g + s * g + d) / (g * g + s * std::abs(g) + d));
      }
      prod = std::max(prod, std::abs(ex.gamma_plus * ex.gamma_minus - d) / d);
      sum = std::max(sum, std::abs(ex.gamma_plus + ex.gamma_minus + s) / s);
      const double lit = ex.beta * ex.beta + 2 * (ex.beta - 2) * d + d * d;
      disc = std::max(disc, std::abs(lit - ex.disc) / ex.disc);
      ordered = ordered && ex.gamma_plus > -1.0 && ex.gamma_plus < 0.0 && ex.gamma_minus < -1.0 &&
                ex.disc >= 4.0 * (ex.beta - 1.0);
    }
    return verdict(res < 1e-13 && prod < 1e-12 && sum < 1e-12 && disc < 1e-12 && ordered,
                   "residual " + detail::describe(res) + ", product " + detail::describe(prod) +
                       ", sum " + detail::describe(sum) + ", disc " + detail::describe(disc));
  });
  check("aux_analysis", "branch discriminant, ordering and quadratic residual", [&] {
    double res = 0.0;
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
      const PMBranchParams p{uniform(0.1, 3.0), uniform(0.1, 5.0), uniform(0.1, 5.0)};
      const double r = std::pow(10.0, uniform(-3.0, 3.0));
      const auto b = psi_branches(r, p);
      ok = ok && b.discriminant > 0.0 && b.psi_plus > b.psi_minus;
      res = std::max({res, implicit_quadratic_residual(r, b.psi_plus, p),
                      implicit_quadratic_residual(r, b.psi_minus, p)});
    }
    return verdict(ok && res < 1e-10, "max residual " + detail::describe(res));
  });
  check("aux_analysis", "weights: f+ minimum at rho1, f- decreasing", [&] {
    const PMBranchParams p{1.0, 1.0, 1.0};
    const double rho1 = plus_branch_minimum(p);
    double lo = 1e-3, hi = 1e3;
    while (hi / lo - 1.0 > 1e-12) {
      const double mid = std::sqrt(lo * hi);
      (psi_branch(Branch::Plus, mid, p) < 0.0 ? lo : hi) = mid;
    }
    const auto rho = log_space(1e-3, 1e3, 121);
    const auto fm = weight_function(Branch::Minus, p, 1.0, 1.0, rho);
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < fm.size(); ++i) decreasing = decreasing && fm.ln_f[i + 1] < fm.ln_f[i];
    const double gap = std::abs(lo - rho1) / rho1;
    return verdict(gap < 1e-9 && decreasing, "rho1 " + detail::describe(rho1) + ", bisection gap " +
                                                 detail::describe(gap));
  });
  check("aux_analysis", "porous-media thresholds and G- at both ends", [&] {
    std::ostringstream os;
    bool ok = true;
    for (const PMBranchParams& p : {PMBranchParams{1, 1, 1}, PMBranchParams{0.5, 2, 0.3}, PMBranchParams{2, 0.5, 4}}) {
      const auto th = find_thresholds(p);
      ok = ok && gtilde_pm(Branch::Plus, 2 * th.rho_bar, p) > 0 && gtilde_pm(Branch::Plus, th.rho_under / 2, p) < 0 &&
           gtilde_pm(Branch::Minus, 1e-6, p) > 0 && gtilde_pm(Branch::Minus, 1e6, p) > 0;
      os << "[" << th.rho_under << ", " << th.rho_bar << "] ";
    }
    return verdict(ok, os.str());
  });

  // diagnostics --------------------------------------------------------------
  check("diagnostics", "entropy production is non-negative", [&] {
    double worst = 0.0;
    for (const auto& m : detail::sample_models()) {
      for (int dim = 1; dim <= 2; ++dim) {
        PeriodicGrid g(dim, 16, 1.0);
        worst = std::min(worst, entropy_production(m, detail::wavy_state(m, g, 0.3)).min());
      }
    }
    return verdict(worst >= -1e-14, "min " + detail::describe(worst));
  });
  check("diagnostics", "ideal-gas extremum principles, positivity and density bound", [&] {
    const auto m = ModelParams::ideal_gas(1.0, 1.0, IdealGasLaw{1.0});
    PeriodicGrid g(1, 64, 1.0);
    SolverConfig cfg;
    cfg.t_end = 0.05;
    cfg.output_stride = 10;
    DiagnosticsMonitor mon(m, cfg.t_end);
    std::vector<std::string> flags;
    bool theta_bound = true;
    const auto res = run(m, detail::wavy_state(m, g, 0.2), cfg, [&](const SimState& s, const StepInfo& info) {
      const auto rec = mon.record(s, info);
      flags.insert(flags.end(), rec.flags.begin(), rec.flags.end());
      theta_bound = theta_bound && rec.min_theta >= mon.theta_lower_bound(rec) * (1.0 - 1e-9);
    });
    return verdict(res.status == RunStatus::Completed && flags.empty() && theta_bound,
                   std::string(to_string(res.status)) + ", flags " + join_flags(flags));
  });

  // sim_cli ------------------------------------------------------------------
  check("sim_cli", "config round trip", [&] {
    const std::string doc =
        "[model]\nkind = generalized_pm\nkappa1 = 0.3\nkappa2 = 1.7\nalpha = 2.5\nbeta = 1.5\nk = 0.1\n"
        "[grid]\ndim = 2\nn = 16\nlength = 3\n[initial]\nrho_amplitude = 0.2\nrho_modes = 1,3\n"
        "[solver]\nt_end = 0.25\nintegrator = euler\n[output]\nseed = 7\n";
    const RunConfig a = parse_config(doc);
    const RunConfig b = parse_config(serialize_config(a));
    return verdict(a == b, "reparsed config equal");
  });
  check("sim_cli", "deterministic diagnostics", [&] {
    const RunConfig cfg = parse_config(
        "[model]\nkind = porous_media\nkappa1 = 1\nkappa2 = 1\nalpha = 2\nd = 1\n[grid]\nn = 16\n"
        "[initial]\nrho_amplitude = 0.1\ntheta_amplitude = 0.1\n[solver]\nt_end = 0.002\n[output]\nstride = 5\nseed = 3\n");
    auto once = [&] {
      std::ostringstream os;
      DiagnosticsMonitor mon(cfg.model, cfg.solver.t_end);
      write_csv_header(os);
      run(cfg.model, initial_state(cfg), cfg.solver,
          [&](const SimState& s, const StepInfo& info) { write_csv_row(os, mon.record(s, info)); });
      return os.str();
    };
    return verdict(once() == once(), "two runs compared byte for byte");
  });
  return out;
}

}  // namespace thermoflux
