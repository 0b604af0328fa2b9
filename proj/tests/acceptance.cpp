// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "thermoflux/thermoflux.hpp"

using namespace thermoflux;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

class Detail {
 public:
  template <class... Args>
  void add(const char* fmt, Args... args) {
    char buf[256];
    if constexpr (sizeof...(args) == 0) {
      std::snprintf(buf, sizeof buf, "%s", fmt);
    } else {
      std::snprintf(buf, sizeof buf, fmt, args...);
    }
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

double slope_at(const WeightTable& t, double rho) {
  const double e = 1e-3;
  return (t.ln_f_at(rho * (1 + e)) - t.ln_f_at(rho * (1 - e))) / (std::log1p(e) - std::log1p(-e));
}

// --------------------------------------------------------------------------
Outcome criterion1() {
  std::mt19937_64 gen(1001);
  std::uniform_real_distribution<double> beta_u(1.0, 10.0), d_u(0.0, 10.0), k2_u(0.1, 10.0);
  double worst_res = 0.0, worst_prod = 0.0;
  bool signs_ok = true;
  for (int i = 0; i < 1000; ++i) {
    double beta = beta_u(gen), d = d_u(gen);
    if (beta == 1.0) beta = 10.0;
    if (d == 0.0) d = 10.0;
    const double k2 = k2_u(gen);
    const auto ex = gamma_exponents((beta - 1.0) * k2, k2, d);
    const double b = ex.beta;
    for (double g : {ex.gamma_plus, ex.gamma_minus}) {
      const double scale = g * g + (b + d) * std::abs(g) + d;
      worst_res = std::max(worst_res, std::abs(g * g + (b + d) * g + d) / scale);
    }
    worst_prod = std::max(worst_prod, std::abs(ex.gamma_plus * ex.gamma_minus - d) / d);
    signs_ok = signs_ok && 1 + ex.gamma_plus > 0 && 1 + ex.gamma_minus < 0 && ex.c_plus < 0 && ex.c_minus > 0;
  }
  Detail det;
  det.add("max residual %.2e, max |g+g- - D|/D %.2e, signs %s", worst_res, worst_prod, signs_ok ? "ok" : "wrong");
  return {worst_res < 1e-13 && worst_prod < 1e-12 && signs_ok, det.str()};
}

// --------------------------------------------------------------------------
Outcome criterion2() {
  std::mt19937_64 gen(1002);
  std::uniform_real_distribution<double> lu(-2, 2), lr(-4, 4);
  double worst = 0.0;
  bool disc_ok = true;
  for (int i = 0; i < 1000; ++i) {
    const PMBranchParams p{std::pow(10.0, lu(gen)), std::pow(10.0, lu(gen)), std::pow(10.0, lu(gen))};
    const double rho = std::pow(10.0, lr(gen));
    const auto v = psi_branches(rho, p);
    disc_ok = disc_ok && v.discriminant > 0;
    worst = std::max({worst, implicit_quadratic_residual(rho, v.psi_plus, p),
                      implicit_quadratic_residual(rho, v.psi_minus, p)});
  }
  Detail det;
  det.add("discriminant %s, max relative residual %.2e", disc_ok ? "positive" : "NOT positive", worst);
  return {disc_ok && worst < 1e-10, det.str()};
}

// --------------------------------------------------------------------------
Outcome criterion3() {
  namespace ode = boost::numeric::odeint;
  const PMBranchParams p{1.0, 1.0, 1.0};
  const auto grid = log_space(1e-5, 1e5, 201);
  const auto plus = weight_function(Branch::Plus, p, 1.0, 1.0, grid);
  const auto minus = weight_function(Branch::Minus, p, 1.0, 1.0, grid);
  const double s_lo = slope_at(plus, 1e-4);
  const double s_hi = slope_at(plus, 1e4);
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < minus.size(); ++i) {
    if (minus.rho[i] >= 1e-4 && minus.rho[i + 1] <= 1e4) decreasing = decreasing && minus.ln_f[i + 1] < minus.ln_f[i];
  }
  // Independent oracle: Psi from the quadratic formula, integrated by dopri5 in ln rho.
  auto psi_oracle = [&](Branch b, double rho) {
    const double a = p.a, k2 = p.kappa2, D = p.d;
    const long double A = k2 * std::pow(rho, a + 3);
    const long double B = a * std::pow(rho, 2 * a + 2) + k2 * (1 - a) * std::pow(rho, a + 2) + D * rho;
    const long double C = D - a * k2 * std::pow(rho, a + 1) - a * a * std::pow(rho, 2 * a + 1);
    const long double s = std::sqrt(B * B - 4 * A * C);
    // Vieta on the cancelling root
    const long double far = B >= 0 ? (-B - s) / (2 * A) : (-B + s) / (2 * A);
    const long double near = C / (A * far);
    const long double hi = std::max(far, near), lo = std::min(far, near);
    return static_cast<double>(b == Branch::Plus ? hi : lo);
  };
  double worst = 0.0;
  const std::vector<double> targets = {1e-4, 1e-2, 0.5, 3.0, 1e2, 1e4};
  for (auto b : {Branch::Plus, Branch::Minus}) {
    const auto tab = weight_function(b, p, 1.0, 1.0, targets);
    for (double target : targets) {
      double y = 0.0;
      auto sys = [&](const double&, double& dy, double s) { dy = std::exp(s) * psi_oracle(b, std::exp(s)); };
      ode::integrate_adaptive(ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<double>()), sys, y, 0.0,
                              std::log(target), std::log(target) / 100);
      const double got = tab.ln_f_at(target);
      worst = std::max(worst, std::abs(got - y) / std::max(1.0, std::abs(y)));
    }
  }
  Detail det;
  det.add("slope f+ at 1e-4 %.4f, at 1e4 %.4f; f- decreasing %s; max dev from ODE oracle %.2e", s_lo, s_hi,
          decreasing ? "yes" : "no", worst);
  return {std::abs(s_lo + 1) <= 0.05 && std::abs(s_hi - 1) <= 0.05 && decreasing && worst <= 1e-8, det.str()};
}

// --------------------------------------------------------------------------
Outcome criterion4() {
  const PMBranchParams p{1.0, 1.0, 1.0};
  const double a = p.a, k2 = p.kappa2, D = p.d;
  const double g_lo = gtilde_pm(Branch::Plus, 1e-4, p);
  const double g_hi = gtilde_pm(Branch::Plus, 1e4, p);
  const auto th = find_thresholds(p);
  const bool signs = g_lo < 0 && g_hi > 0 && gtilde_pm(Branch::Plus, 2 * th.rho_bar, p) > 0 &&
                     gtilde_pm(Branch::Plus, th.rho_under / 2, p) < 0;
  // Reference leading-order magnitudes at the scan endpoints (f = 1).
  const double r0 = th.scan_rho.front(), r1 = th.scan_rho.back();
  const double lead_lo = -8 * a * D * D * D / (k2 * k2 * (a + 1) * (a + 1)) * std::pow(r0, -2 * a - 2);
  const double lead_hi = a * a * (2 * a + 9) / (9 * (a + 1)) * std::pow(r1, 2 * a + 1);
  const double ratio_lo = gtilde_pm(Branch::Plus, r0, p) / lead_lo;
  const double ratio_hi = gtilde_pm(Branch::Plus, r1, p) / lead_hi;
  const bool magnitude = std::abs(ratio_lo - 1) <= 0.25 && std::abs(ratio_hi - 1) <= 0.25;
  Detail det;
  det.add("signs %s, rho_under %.11g, rho_bar %.11g", signs ? "ok" : "wrong", th.rho_under, th.rho_bar);
  det.add("G+/leading at rho=%.0e: %.3g, at rho=%.0e: %.3g", r0, ratio_lo, r1, ratio_hi);
  if (!magnitude) {
    // what the reduced coefficient actually approaches
    const double true_lo = gtilde_pm(Branch::Plus, r0, p) / (-2 * (a + 1) * k2 * D * std::pow(r0, -a));
    const double true_hi = gtilde_pm(Branch::Plus, r1, p) / (a * k2 * D * std::pow(r1, -a));
    det.add("reference leading-order magnitudes not reproduced; G+ / (-2(a+1)k2 D rho^-a) = %.4f at %.0e, "
            "G+ / (a k2 D rho^-a) = %.4f at %.0e", true_lo, r0, true_hi, r1);
  }
  return {signs && magnitude, det.str()};
}

// --------------------------------------------------------------------------
SimState wave(const ModelParams& m, const PeriodicGrid& g, double rho0, double ra, double ta, int theta_mode = 1) {
  const double k = 2 * std::numbers::pi / g.length();
  const auto rho = ScalarField::sample(g, [&](double x, double y) { return rho0 * (1 + ra * std::sin(k * (x + y))); });
  const auto theta =
      ScalarField::sample(g, [&](double x, double y) { return 1 + ta * std::cos(theta_mode * k * (x + y)); });
  return make_state(m, rho, theta);
}

Outcome criterion5() {
  const std::vector<ModelParams> models = {ModelParams::ideal_gas(1, 1, IdealGasLaw{1}),
                                           ModelParams::porous_media(1, 1, 2, PMLaw{1}),
                                           ModelParams::generalized_pm(1, 1, 2, 2, ConstantConductivity{1})};
  double worst = 0.0;
  double slowest = 0.0;
  for (const auto& m : models) {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& g : {PeriodicGrid(1, 128, 1.0), PeriodicGrid(2, 64, 1.0)}) {
      SimState s = wave(m, g, 1.0, 0.2, 0.2);
      const double mass0 = total(s.rho), w0 = total(s.w);
      for (int i = 0; i < 1000; ++i) s = step(m, s, stable_dt(m, s, 0.5), Integrator::RK2);
      worst = std::max({worst, std::abs(total(s.rho) / mass0 - 1), std::abs(total(s.w) / w0 - 1)});
    }
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  Detail det;
  det.add("1000 RK2 steps, 1D n=128 and 2D 64^2, max relative drift %.2e, slowest model %.1f s", worst, slowest);
  return {worst <= 1e-11 && slowest < 30, det.str()};
}

// --------------------------------------------------------------------------
struct IdealGasRun {
  Outcome outcome;
  double entropy_min = 0.0;
};

IdealGasRun criterion6() {
  const auto m = ModelParams::ideal_gas(1, 1, IdealGasLaw{1});
  const PeriodicGrid g(1, 256, 1.0);
  SolverConfig cfg;
  cfg.t_end = 0.5;
  cfg.output_stride = 10;
  DiagnosticsMonitor mon(m, cfg.t_end);
  IdealGasRun out;
  out.entropy_min = std::numeric_limits<double>::infinity();
  double max_rho = 0.0, min_theta = std::numeric_limits<double>::infinity();
  double worst_sup = 0.0, worst_inf = 0.0;
  std::size_t flagged = 0;
  const auto r = run(m, wave(m, g, 1.0, 0.2, 0.2), cfg, [&](const SimState& s, const StepInfo& info) {
    const auto rec = mon.record(s, info);
    flagged += !rec.flags.empty();
    max_rho = std::max(max_rho, rec.max_rho);
    min_theta = std::min(min_theta, rec.min_theta);
    worst_sup = std::max(worst_sup, (rec.aux_plus_sup - mon.c1()) / mon.c1());
    worst_inf = std::max(worst_inf, (mon.c2() - rec.aux_minus_inf) / mon.c2());
    out.entropy_min = std::min(out.entropy_min, rec.entropy_min);
  });
  const double bound = mon.density_bound();
  Detail det;
  det.add("status %s, %zu steps, flagged records %zu", to_string(r.status), r.steps, flagged);
  det.add("sup excursion %.2e, inf excursion %.2e (tol C(dt+h^2)T = %.2e)", worst_sup, worst_inf,
          mon.tolerance({r.steps, 0, r.max_dt}, g.spacing()));
  det.add("min theta %.4f, max rho %.4f vs bound %.5f", min_theta, max_rho, bound);
  out.outcome = {r.status == RunStatus::Completed && flagged == 0 && min_theta > 0 && max_rho <= bound * 1.01,
                 det.str()};
  return out;
}

Outcome criterion7(double ig_entropy_min) {
  const auto m = ModelParams::porous_media(1, 1, 2, PMLaw{1});
  const PeriodicGrid g(1, 128, 1.0);
  SolverConfig cfg;
  cfg.t_end = 0.01;
  cfg.output_stride = 10;
  double pm_min = std::numeric_limits<double>::infinity();
  const auto r = run(m, wave(m, g, 1.0, 0.2, 0.2), cfg, [&](const SimState& s, const StepInfo&) {
    pm_min = std::min(pm_min, entropy_production(m, s).min());
  });
  Detail det;
  det.add("min pointwise entropy production: ideal gas %.3e, porous media %.3e (%zu steps)", ig_entropy_min, pm_min,
          r.steps);
  return {r.status == RunStatus::Completed && ig_entropy_min >= -1e-14 && pm_min >= -1e-14, det.str()};
}

// --------------------------------------------------------------------------
Outcome criterion8() {
  const auto m = ModelParams::porous_media(1, 1, 2, PMLaw{1});
  DiagnosticsMonitor mon(m, 0.01);
  const double rho_under = mon.pm_data()->thresholds.rho_under;
  const PeriodicGrid g(1, 64, 1.0);
  SolverConfig cfg;
  cfg.t_end = 0.01;
  cfg.output_stride = 1;
  std::size_t flagged = 0, monitored = 0;
  double worst_sup = 0.0, worst_inf = 0.0;
  const auto r = run(m, wave(m, g, 0.01 * rho_under, 0.1, 0.1, 2), cfg, [&](const SimState& s, const StepInfo& info) {
    const auto rec = mon.record(s, info);
    if (mon.regime_exited()) return;
    ++monitored;
    flagged += rec.has_flag(flag::kPmLow);
    worst_sup = std::max(worst_sup, (rec.aux_plus_sup - mon.c1()) / mon.c1());
    worst_inf = std::max(worst_inf, (mon.c2() - rec.aux_minus_inf) / mon.c2());
  });
  Detail det;
  det.add("rho0 = %.5g, initial regime %s, %zu monitored records, %zu flagged", 0.01 * rho_under,
          to_string(mon.initial_regime()), monitored, flagged);
  det.add("sup theta excursion %.2e, inf excursion %.2e, status %s", worst_sup, worst_inf, to_string(r.status));
  return {r.status == RunStatus::Completed && mon.initial_regime() == PMRegime::Low && flagged == 0 && monitored > 1,
          det.str()};
}

// --------------------------------------------------------------------------
Outcome criterion9() {
  const double L = 1.0, k = 2 * std::numbers::pi / L;
  std::vector<double> el, eg;
  for (int n : {32, 64, 128, 256}) {
    const PeriodicGrid g(1, n, L);
    const auto f = ScalarField::sample(g, [&](double x) { return std::sin(k * x); });
    const auto lap = laplacian(f);
    const auto grad = gradient(f);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coordinate(i, 0);
      a = std::max(a, std::abs(lap[i] + k * k * std::sin(k * x)));
      b = std::max(b, std::abs(grad[0][i] - k * std::cos(k * x)));
    }
    el.push_back(a);
    eg.push_back(b);
  }
  bool ok = true;
  Detail det;
  for (std::size_t i = 0; i + 1 < el.size(); ++i) {
    const double rl = el[i] / el[i + 1], rg = eg[i] / eg[i + 1];
    ok = ok && rl >= 3.5 && rl <= 4.5 && rg >= 3.5 && rg <= 4.5;
    det.add("ratios %.3f/%.3f", rl, rg);
  }
  const auto m = ModelParams::ideal_gas(1, 1, IdealGasLaw{1});
  const PeriodicGrid g(1, 32, 1.0);
  const SimState s0 = wave(m, g, 1.0, 0.1, 0.1);
  const double t_end = 0.01;
  auto integrate = [&](int steps) {
    SimState s = s0;
    for (int i = 0; i < steps; ++i) s = step(m, s, t_end / steps, Integrator::RK2);
    return s;
  };
  const SimState ref = integrate(128 * 64);
  auto err = [&](int steps) {
    const SimState s = integrate(steps);
    double e = 0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(s.rho[i] - ref.rho[i]));
    return e;
  };
  const double order = std::log2(err(128) / err(256));
  det.add("RK2 order %.3f", order);
  return {ok && order >= 1.8 && order <= 2.2, det.str()};
}

// --------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion10() {
  namespace fs = std::filesystem;
  const fs::path work = fs::temp_directory_path() / "thermoflux_acceptance_determinism";
  fs::remove_all(work);
  Detail det;
  bool ok = true;
  for (const char* name : {"ideal_gas.ini", "porous_media.ini", "generalized_pm.ini"}) {
    std::string csv[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = work / (std::string(name) + std::to_string(k));
      const std::string cmd = std::string(kOutputDirEnv) + "='" + dir.string() + "' '" + THERMOFLUX_EXE + "' run '" +
                              THERMOFLUX_SOURCE_DIR + "/configs/" + name + "' > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        det.add("%s: run failed", name);
      }
      csv[k] = slurp(dir / "diagnostics.csv");
    }
    const bool same = !csv[0].empty() && csv[0] == csv[1];
    ok = ok && same;
    det.add("%s %s (%zu bytes)", name, same ? "identical" : "DIFFERENT", csv[0].size());
  }
  fs::remove_all(work);
  return {ok, det.str()};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::function<Outcome()>& fn, double limit_s = 0) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) {
      o.passed = false;
      o.detail += "; over time limit";
    }
    failures += !o.passed;
    std::printf("criterion %2d: %s  [%.2f s] %s\n", id, o.passed ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, criterion1, 1);
  report(2, criterion2, 1);
  report(3, criterion3, 5);
  report(4, criterion4, 5);
  report(5, criterion5);
  double ig_entropy_min = -1;
  report(6, [&] {
    auto r = criterion6();
    ig_entropy_min = r.entropy_min;
    return r.outcome;
  }, 60);
  report(7, [&] { return criterion7(ig_entropy_min); });
  report(8, criterion8, 60);
  report(9, criterion9);
  report(10, criterion10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
