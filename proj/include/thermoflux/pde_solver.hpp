#pragma once

// Explicit time integration of the three coupled density/temperature systems
// on a periodic grid. The evolved variables are the conserved pair (rho, w)
// with w = rho theta (ideal gas, porous media) or w = rho theta^beta
// (generalized porous media); both equations are pure divergences, so the
// discrete totals of rho and w are conserved to round-off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "thermoflux/error.hpp"
#include "thermoflux/grid.hpp"
#include "thermoflux/thermo_models.hpp"

namespace thermoflux {

struct SimState {
  ScalarField rho;
  ScalarField w;
  double t = 0.0;
};

enum class Integrator { Euler, RK2 };

struct SolverConfig {
  double dt_safety = 0.5;
  double t_end = 1.0;
  std::size_t output_stride = 100;
  Integrator integrator = Integrator::RK2;
  bool abort_on_nonpositive_theta = true;

  void validate() const {
    if (!(dt_safety > 0.0 && dt_safety <= 1.0)) throw ConfigError("dt_safety must lie in (0, 1]");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be finite and >= 0");
    if (output_stride == 0) throw ConfigError("output stride must be at least 1");
  }

  bool operator==(const SolverConfig&) const = default;
};

enum class RunStatus { Completed, AbortedNonpositiveRho, AbortedNonpositiveTheta, AbortedNonfinite };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::AbortedNonpositiveRho: return "aborted-nonpositive-rho";
    case RunStatus::AbortedNonpositiveTheta: return "aborted-nonpositive-theta";
    case RunStatus::AbortedNonfinite: return "aborted-nonfinite";
  }
  return "?";
}

/// w from (rho, theta) for the given model.
inline double conserved_thermal(const ModelParams& m, double rho, double theta) {
  return m.kind == ModelKind::GeneralizedPM ? rho * std::pow(theta, m.beta_exp) : rho * theta;
}

inline SimState make_state(const ModelParams& m, const ScalarField& rho, const ScalarField& theta,
                           double t = 0.0) {
  return {rho, zip_with(rho, theta, [&](double r, double th) { return conserved_thermal(m, r, th); }),
          t};
}

/// theta = w / rho, or (w / rho)^(1/beta) for the generalized model.
inline ScalarField recover_theta(const ModelParams& m, const SimState& s) {
  s.rho.require_same_grid(s.w);
  ScalarField theta(s.rho.grid());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double ratio = s.w[i] / s.rho[i];
    if (m.kind == ModelKind::GeneralizedPM) {
      if (!(ratio > 0.0)) {
        throw PositivityError("w / rho = " + std::to_string(ratio) + " at node " +
                              std::to_string(i) + "; theta cannot be recovered");
      }
      theta[i] = std::pow(ratio, 1.0 / m.beta_exp);
    } else {
      theta[i] = ratio;
    }
    if (!std::isfinite(theta[i])) {
      throw OverflowError("non-finite temperature at node " + std::to_string(i));
    }
  }
  return theta;
}

struct Rates {
  ScalarField drho_dt;
  ScalarField dw_dt;
};

namespace detail {

inline void require_positive_density(const ScalarField& rho) {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) {
      throw DegenerateStateError("density " + std::to_string(rho[i]) + " at node " +
                                 std::to_string(i));
    }
  }
}

}  // namespace detail

inline Rates rhs(const ModelParams& m, const SimState& s) {
  detail::require_positive_density(s.rho);
  const ScalarField theta = recover_theta(m, s);
  const ScalarField kappa3 =
      zip_with(s.rho, theta, [&](double r, double th) { return m.kappa3(r, th); });
  const double k1 = m.kappa1;
  const double k2 = m.kappa2;

  switch (m.kind) {
    case ModelKind::IdealGas: {
      // rho_t = k1 lap(rho theta)
      // w_t   = k1 (k1 + k2) / k2 div(theta grad w) + div(kappa3 grad theta) / k2
      ScalarField drho = laplacian(s.w);
      drho *= k1;
      ScalarField dw = div_a_grad_b(theta, s.w);
      dw *= k1 * (k1 + k2) / k2;
      dw.axpy(1.0 / k2, div_a_grad_b(kappa3, theta));
      return {std::move(drho), std::move(dw)};
    }
    case ModelKind::PorousMedia: {
      const double a = m.a();
      const ScalarField g =
          zip_with(theta, s.rho, [&](double th, double r) { return th * std::pow(r, m.alpha); });
      const ScalarField theta_rho_a =
          zip_with(theta, s.rho, [&](double th, double r) { return th * std::pow(r, a); });
      ScalarField drho = laplacian(g);
      drho *= k1 * a;
      ScalarField dw = div_a_grad_b(theta, g);
      dw *= k1 * a;
      dw.axpy(k1 * k1 * a * a / k2, div_a_grad_b(theta_rho_a, g));
      dw.axpy(1.0 / k2, div_a_grad_b(kappa3, theta));
      return {std::move(drho), std::move(dw)};
    }
    case ModelKind::GeneralizedPM: {
      const double a = m.a();
      const double b = m.beta_exp;
      const double heat = k2 * (b - 1.0);
      const ScalarField g =
          zip_with(theta, s.rho, [&](double th, double r) { return th * std::pow(r, m.alpha); });
      const ScalarField theta_rho_a =
          zip_with(theta, s.rho, [&](double th, double r) { return th * std::pow(r, a); });
      const ScalarField theta_b = theta.map([&](double th) { return std::pow(th, b); });
      ScalarField drho = laplacian(g);
      drho *= k1 * a;
      ScalarField dw = div_a_grad_b(theta_b, g);
      dw *= k1 * a;
      dw.axpy(k1 * k1 * a * a / heat, div_a_grad_b(theta_rho_a, g));
      dw.axpy(1.0 / heat, div_a_grad_b(kappa3, theta));
      return {std::move(drho), std::move(dw)};
    }
  }
  throw ConfigError("unknown model kind");
}

/// Largest effective diffusion coefficient over all nodes.
///
/// Coefficients are the entries of the linearised diffusion matrix written in
/// relative variables (drho/rho, dw/w):
///   IdealGas       k1 theta, k1 beta theta, kappa3 / (k2 rho)
///   PorousMedia    k1 a theta rho^a, k1 a^2 theta rho^a, E + kappa3/(k2 rho),
///                  a E, kappa3 / (k2 rho)      with E = k1 a theta rho^a + k1^2 a^2 theta rho^2a / k2
///   GeneralizedPM  k1 a theta rho^a / beta, k1 a theta rho^a (alpha - 1/beta),
///                  (E + c kappa3 theta^(1-beta) / rho) / beta, E (alpha - 1/beta),
///                  c kappa3 theta^(1-beta) / (beta rho)
///                  with c = 1 / (k2 (beta - 1)), E = k1 a theta rho^a + k1^2 a^2 c theta^(2-beta) rho^2a
/// The trace of that matrix never exceeds twice the maximum entry, so
/// dt_safety <= 0.5 keeps forward Euler and Heun linearly stable.
inline double max_diffusivity(const ModelParams& m, const SimState& s) {
  const ScalarField theta = recover_theta(m, s);
  const double k1 = m.kappa1;
  const double k2 = m.kappa2;
  double dmax = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double r = s.rho[i];
    const double th = std::abs(theta[i]);
    const double cond = std::abs(m.kappa3(r, theta[i]));
    switch (m.kind) {
      case ModelKind::IdealGas:
        dmax = std::max({dmax, k1 * th, k1 * m.beta_ig() * th, cond / (k2 * r)});
        break;
      case ModelKind::PorousMedia: {
        const double a = m.a();
        const double ra = std::pow(r, a);
        const double e = k1 * a * th * ra + k1 * k1 * a * a * th * ra * ra / k2;
        const double heat = cond / (k2 * r);
        dmax = std::max({dmax, k1 * a * th * ra, k1 * a * a * th * ra, e + heat, a * e, heat});
        break;
      }
      case ModelKind::GeneralizedPM: {
        const double a = m.a();
        const double b = m.beta_exp;
        const double c = 1.0 / (k2 * (b - 1.0));
        const double ra = std::pow(r, a);
        const double e = k1 * a * th * ra + k1 * k1 * a * a * c * std::pow(th, 2.0 - b) * ra * ra;
        const double heat = c * cond * std::pow(th, 1.0 - b) / r;
        const double mix = std::abs(m.alpha - 1.0 / b);
        dmax = std::max({dmax, k1 * a * th * ra / b, k1 * a * th * ra * mix, (e + heat) / b,
                         e * mix, heat / b});
        break;
      }
    }
  }
  return dmax;
}

/// dt = dt_safety * h^2 / (2 dim Dmax)
inline double stable_dt(const ModelParams& m, const SimState& s, double dt_safety) {
  if (!(dt_safety > 0.0 && dt_safety <= 1.0)) throw ConfigError("dt_safety must lie in (0, 1]");
  detail::require_positive_density(s.rho);
  const double dmax = max_diffusivity(m, s);
  if (!(dmax > 0.0) || !std::isfinite(dmax)) {
    throw ConfigError("maximum diffusion coefficient is " + std::to_string(dmax));
  }
  const PeriodicGrid& g = s.rho.grid();
  const double h = g.spacing();
  return dt_safety * h * h / (2.0 * g.dim() * dmax);
}

namespace detail {

inline void check_updated_state(const ModelParams& m, const SimState& s, bool abort_on_theta) {
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    if (!std::isfinite(s.rho[i]) || !std::isfinite(s.w[i])) {
      throw OverflowError("non-finite state at node " + std::to_string(i));
    }
  }
  require_positive_density(s.rho);
  const ScalarField theta = recover_theta(m, s);
  if (abort_on_theta) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      if (!(theta[i] > 0.0)) {
        throw PositivityError("temperature " + std::to_string(theta[i]) + " at node " +
                              std::to_string(i));
      }
    }
  }
}

inline SimState advance(const SimState& s, const Rates& k, double dt) {
  SimState out = s;
  out.rho.axpy(dt, k.drho_dt);
  out.w.axpy(dt, k.dw_dt);
  out.t = s.t + dt;
  return out;
}

}  // namespace detail

/// One forward Euler or Heun step. Never clips: a non-positive density (or
/// temperature, when `abort_on_nonpositive_theta`) raises instead.
inline SimState step(const ModelParams& m, const SimState& s, double dt, Integrator integrator,
                     bool abort_on_nonpositive_theta = true) {
  const Rates k1 = rhs(m, s);
  if (integrator == Integrator::Euler) {
    SimState next = detail::advance(s, k1, dt);
    detail::check_updated_state(m, next, abort_on_nonpositive_theta);
    return next;
  }
  SimState predictor = detail::advance(s, k1, dt);
  detail::check_updated_state(m, predictor, abort_on_nonpositive_theta);
  const Rates k2 = rhs(m, predictor);
  SimState next = s;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    next.rho[i] = s.rho[i] + 0.5 * dt * (k1.drho_dt[i] + k2.drho_dt[i]);
    next.w[i] = s.w[i] + 0.5 * dt * (k1.dw_dt[i] + k2.dw_dt[i]);
  }
  next.t = s.t + dt;
  detail::check_updated_state(m, next, abort_on_nonpositive_theta);
  return next;
}

struct StepInfo {
  std::size_t steps = 0;
  double dt = 0.0;      // last step size (0 before the first step)
  double max_dt = 0.0;  // largest step taken so far
};

using Observer = std::function<void(const SimState&, const StepInfo&)>;

struct RunResult {
  SimState state;
  RunStatus status = RunStatus::Completed;
  std::size_t steps = 0;
  double max_dt = 0.0;
  std::string message;
};

/// Advances to `config.t_end` with dt = stable_dt each step (the last step is
/// shortened to land on t_end). The observer sees the initial state, every
/// `output_stride`-th step and the final state.
inline RunResult run(const ModelParams& m, const SimState& initial, const SolverConfig& config,
                     const Observer& observer = {}) {
  config.validate();
  m.validate();
  RunResult result{initial, RunStatus::Completed, 0, 0.0, {}};
  StepInfo info;
  if (observer) observer(result.state, info);

  const double t_end = config.t_end;
  bool observed_last = true;
  try {
    while (result.state.t < t_end) {
      const double remaining = t_end - result.state.t;
      double dt = stable_dt(m, result.state, config.dt_safety);
      const bool last = dt >= remaining * (1.0 - 1e-12);
      if (last) dt = remaining;
      SimState next = step(m, result.state, dt, config.integrator, config.abort_on_nonpositive_theta);
      if (last) next.t = t_end;
      result.state = std::move(next);
      ++result.steps;
      result.max_dt = std::max(result.max_dt, dt);
      info = {result.steps, dt, result.max_dt};
      observed_last = false;
      if (observer && result.steps % config.output_stride == 0) {
        observer(result.state, info);
        observed_last = true;
      }
    }
  } catch (const DegenerateStateError& e) {
    result.status = RunStatus::AbortedNonpositiveRho;
    result.message = e.what();
  } catch (const PositivityError& e) {
    result.status = RunStatus::AbortedNonpositiveTheta;
    result.message = e.what();
  } catch (const OverflowError& e) {
    result.status = RunStatus::AbortedNonfinite;
    result.message = e.what();
  }
  if (observer && !observed_last) observer(result.state, info);
  return result;
}

}  // namespace thermoflux
