#pragma once

// Per-output-step diagnostics: conserved totals, extrema, entropy production
// and the auxiliary variables whose extremum principles the theory predicts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thermoflux/aux_analysis.hpp"
#include "thermoflux/error.hpp"
#include "thermoflux/grid.hpp"
#include "thermoflux/pde_solver.hpp"
#include "thermoflux/thermo_models.hpp"

namespace thermoflux {

/// Monitor tolerance is kMonitorTolerance * (max_dt + h^2) * t_end, relative
/// to the initial extremum. Calibrated on the 1D ideal-gas fixture
/// (n = 256, t_end = 0.5), checked at every step: the observed excursion
/// there is exactly zero, so this leaves room for other fixtures.
inline constexpr double kMonitorTolerance = 1.0;

/// Relative slack on the ideal-gas density bound.
inline constexpr double kDensityBoundTolerance = 1e-2;

namespace flag {
inline constexpr const char* kIgMax = "ig-max";
inline constexpr const char* kIgMin = "ig-min";
inline constexpr const char* kIgRhoBound = "ig-rho-bound";
inline constexpr const char* kPmHigh = "pm-high";
inline constexpr const char* kPmLow = "pm-low";
inline constexpr const char* kRegimeUndefined = "regime-undefined";
}  // namespace flag

/// Pointwise entropy production (rho |u|^2 + kappa3 |grad theta|^2 / theta) / theta.
inline ScalarField entropy_production(const ModelParams& m, const SimState& s) {
  const ScalarField theta = recover_theta(m, s);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > 0.0)) {
      throw PositivityError("entropy production needs theta > 0; theta = " +
                            std::to_string(theta[i]) + " at node " + std::to_string(i));
    }
  }
  const VectorField u = darcy_velocity(m, s.rho, theta);
  const VectorField grad_theta = gradient(theta);
  ScalarField out(theta.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double k3 = m.kappa3(s.rho[i], theta[i]);
    out[i] = (s.rho[i] * norm_squared(u, i) + k3 * norm_squared(grad_theta, i) / theta[i]) /
             theta[i];
  }
  return out;
}

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double min_theta = 0.0;
  double max_theta = 0.0;
  double aux_plus_sup = std::numeric_limits<double>::quiet_NaN();
  double aux_minus_inf = std::numeric_limits<double>::quiet_NaN();
  double entropy_total = 0.0;
  double entropy_min = 0.0;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }
};

enum class PMRegime { Low, High, Undefined };

inline const char* to_string(PMRegime r) {
  switch (r) {
    case PMRegime::Low: return "low";
    case PMRegime::High: return "high";
    case PMRegime::Undefined: return "undefined";
  }
  return "?";
}

/// Porous-media monitoring data: rescaled branch parameters, thresholds and
/// tabulated weights for states that straddle the thresholds.
struct PMMonitorData {
  PMBranchParams params;
  double rho_scale;  // k1^(1/a)
  Thresholds thresholds;
  WeightTable plus;
  WeightTable minus;

  static PMMonitorData build(const ModelParams& m) {
    const PMBranchParams p = PMBranchParams::from_model(m);
    const auto grid = log_space(1e-6, 1e6, 241);
    return {p, rescale_density(m, 1.0), find_thresholds(p),
            weight_function(Branch::Plus, p, 1.0, 1.0, grid),
            weight_function(Branch::Minus, p, 1.0, 1.0, grid)};
  }

  PMRegime regime(double min_rho_scaled, double max_rho_scaled) const {
    if (max_rho_scaled < thresholds.rho_under) return PMRegime::Low;
    if (min_rho_scaled > thresholds.rho_bar) return PMRegime::High;
    return PMRegime::Undefined;
  }
};

/// Stateful per-run monitor. The first record fixes the reference constants
/// (c1, c2 for the ideal gas; the initial regime for porous media); later
/// records are checked against the running envelopes.
class DiagnosticsMonitor {
 public:
  DiagnosticsMonitor(const ModelParams& m, double t_end, double tolerance_constant = kMonitorTolerance)
      : model_(m), t_end_(t_end), tolerance_constant_(tolerance_constant) {
    m.validate();
    if (m.kind == ModelKind::IdealGas) {
      if (const auto* law = std::get_if<IdealGasLaw>(&m.conductivity)) {
        exponents_ = gamma_exponents(m.kappa1, m.kappa2, law->d_tilde);
      }
    } else if (m.kind == ModelKind::PorousMedia && std::holds_alternative<PMLaw>(m.conductivity)) {
      pm_ = std::make_shared<const PMMonitorData>(PMMonitorData::build(m));
    }
  }

  /// Reuses precomputed porous-media tables (sweeps, repeated runs).
  DiagnosticsMonitor(const ModelParams& m, double t_end, std::shared_ptr<const PMMonitorData> pm,
                     double tolerance_constant = kMonitorTolerance)
      : model_(m), t_end_(t_end), tolerance_constant_(tolerance_constant), pm_(std::move(pm)) {
    m.validate();
  }

  bool monitors_ideal_gas() const noexcept { return exponents_.has_value(); }
  bool monitors_porous_media() const noexcept { return pm_ != nullptr; }
  const std::optional<IdealGasExponents>& exponents() const noexcept { return exponents_; }
  const PMMonitorData* pm_data() const noexcept { return pm_.get(); }

  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }

  /// (c1 / c2)^(1 / (gamma+ - gamma-)); NaN before the first record.
  double density_bound() const {
    if (!exponents_ || !started_) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(c1_ / c2_, 1.0 / (exponents_->gamma_plus - exponents_->gamma_minus));
  }

  /// Lower temperature bound c2 * min_rho^-(1 + gamma-) implied by the
  /// minimum principle, for a record of this run.
  double theta_lower_bound(const DiagnosticsRecord& r) const {
    if (!exponents_ || !started_) return std::numeric_limits<double>::quiet_NaN();
    return c2_ * std::pow(r.min_rho, -(1.0 + exponents_->gamma_minus));
  }

  /// Current absolute tolerance factor (relative to the reference extremum).
  double tolerance(const StepInfo& info, double h) const {
    return tolerance_constant_ * (info.max_dt + h * h) * t_end_;
  }

  PMRegime initial_regime() const noexcept { return initial_regime_; }
  bool regime_exited() const noexcept { return regime_exited_; }

  DiagnosticsRecord record(const SimState& s, const StepInfo& info = {}) {
    const ScalarField theta = recover_theta(model_, s);
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass = total(s.rho);
    r.min_rho = s.rho.min();
    r.max_rho = s.rho.max();
    r.min_theta = theta.min();
    r.max_theta = theta.max();
    if (r.min_theta > 0.0) {
      const ScalarField delta = entropy_production(model_, s);
      r.entropy_total = total(delta);
      r.entropy_min = delta.min();
    } else {
      r.entropy_total = r.entropy_min = std::numeric_limits<double>::quiet_NaN();
    }
    const double eps = tolerance(info, s.rho.grid().spacing());
    if (exponents_) {
      record_ideal_gas(s, theta, eps, r);
    } else if (pm_) {
      record_porous_media(s, theta, eps, r);
    }
    started_ = true;
    return r;
  }

 private:
  void record_ideal_gas(const SimState& s, const ScalarField& theta, double eps,
                        DiagnosticsRecord& r) {
    const double ep = 1.0 + exponents_->gamma_plus;
    const double em = 1.0 + exponents_->gamma_minus;
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      sup = std::max(sup, theta[i] * std::pow(s.rho[i], ep));
      inf = std::min(inf, theta[i] * std::pow(s.rho[i], em));
    }
    r.aux_plus_sup = sup;
    r.aux_minus_inf = inf;
    if (!started_) {
      c1_ = running_sup_ = sup;
      c2_ = running_inf_ = inf;
      return;
    }
    if (sup - running_sup_ > eps * std::abs(c1_)) r.flags.emplace_back(flag::kIgMax);
    if (running_inf_ - inf > eps * std::abs(c2_)) r.flags.emplace_back(flag::kIgMin);
    running_sup_ = std::min(running_sup_, sup);
    running_inf_ = std::max(running_inf_, inf);
    if (r.max_rho > density_bound() * (1.0 + kDensityBoundTolerance)) {
      r.flags.emplace_back(flag::kIgRhoBound);
    }
  }

  void record_porous_media(const SimState& s, const ScalarField& theta, double eps,
                           DiagnosticsRecord& r) {
    const PMMonitorData& pm = *pm_;
    const double a = pm.params.a;
    const double k2 = pm.params.kappa2;
    const double d = pm.params.d;
    const PMRegime regime = pm.regime(pm.rho_scale * r.min_rho, pm.rho_scale * r.max_rho);

    // Plus and minus auxiliary variables f rho theta, using the asymptotic
    // profile of the current regime or the tables in between.
    auto aux = [&](std::size_t i, Branch b) {
      const double rt = pm.rho_scale * s.rho[i];
      switch (regime) {
        case PMRegime::Low:
          return b == Branch::Plus ? theta[i]
                                   : rt * theta[i] * std::exp(d / (k2 * (a + 1.0)) * std::pow(rt, -a - 1.0));
        case PMRegime::High:
          return b == Branch::Plus ? std::pow(rt, a + 1.0) * theta[i]
                                   : rt * std::exp(-std::pow(rt, a) / k2) * theta[i];
        case PMRegime::Undefined: {
          const WeightTable& tab = b == Branch::Plus ? pm.plus : pm.minus;
          if (rt < tab.rho.front() || rt > tab.rho.back()) {
            return std::numeric_limits<double>::quiet_NaN();
          }
          return std::exp(tab.ln_f_at(rt)) * rt * theta[i];
        }
      }
      return std::numeric_limits<double>::quiet_NaN();
    };
    double sup_p = -std::numeric_limits<double>::infinity();
    double inf_p = std::numeric_limits<double>::infinity();
    double inf_m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double vp = aux(i, Branch::Plus);
      const double vm = aux(i, Branch::Minus);
      sup_p = std::max(sup_p, vp);
      inf_p = std::min(inf_p, vp);
      inf_m = std::min(inf_m, vm);
    }
    r.aux_plus_sup = sup_p;
    r.aux_minus_inf = inf_m;
    if (regime == PMRegime::Undefined) r.flags.emplace_back(flag::kRegimeUndefined);

    if (!started_) {
      initial_regime_ = regime;
      regime_exited_ = regime == PMRegime::Undefined;
      c1_ = running_sup_ = regime == PMRegime::High ? inf_p : sup_p;
      c2_ = running_inf_ = inf_m;
      return;
    }
    if (regime_exited_) return;
    if (regime != initial_regime_) {
      regime_exited_ = true;
      return;
    }
    if (regime == PMRegime::Low) {
      // theta is a maximum-principle variable, rho exp(...) theta a minimum one.
      if (sup_p - running_sup_ > eps * std::abs(c1_) || running_inf_ - inf_m > eps * std::abs(c2_)) {
        r.flags.emplace_back(flag::kPmLow);
      }
      running_sup_ = std::min(running_sup_, sup_p);
    } else {
      // Both weighted variables obey minimum principles at high density.
      if (running_sup_ - inf_p > eps * std::abs(c1_) || running_inf_ - inf_m > eps * std::abs(c2_)) {
        r.flags.emplace_back(flag::kPmHigh);
      }
      running_sup_ = std::max(running_sup_, inf_p);
    }
    running_inf_ = std::max(running_inf_, inf_m);
  }

  ModelParams model_;
  double t_end_;
  double tolerance_constant_;
  std::optional<IdealGasExponents> exponents_;
  std::shared_ptr<const PMMonitorData> pm_;
  bool started_ = false;
  double c1_ = std::numeric_limits<double>::quiet_NaN();
  double c2_ = std::numeric_limits<double>::quiet_NaN();
  double running_sup_ = 0.0;  // running min of the sup (or max of the inf, high regime)
  double running_inf_ = 0.0;  // running max of the inf
  PMRegime initial_regime_ = PMRegime::Undefined;
  bool regime_exited_ = false;
};

// ---------------------------------------------------------------------------
// CSV time series

inline constexpr const char* kDiagnosticsHeader =
    "t,mass,min_rho,max_rho,min_theta,max_theta,aux_plus_sup,aux_minus_inf,entropy_total,"
    "entropy_min,flags";

inline std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

inline void write_csv_header(std::ostream& os) { os << kDiagnosticsHeader << '\n'; }

inline void write_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
  const double cols[] = {r.t,         r.mass,         r.min_rho,       r.max_rho,
                         r.min_theta, r.max_theta,    r.aux_plus_sup,  r.aux_minus_inf,
                         r.entropy_total, r.entropy_min};
  for (double v : cols) os << detail::format_double(v) << ',';
  os << join_flags(r.flags) << '\n';
}

}  // namespace thermoflux
