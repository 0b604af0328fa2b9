#pragma once

// Free energies of the three non-isothermal fluid models and every
// thermodynamic quantity derived from them. All functions are pure.
//
//   IdealGas        Psi = k1 theta rho ln(rho) - k2 rho theta ln(theta)
//   PorousMedia     Psi = k1 theta rho^alpha  - k2 rho theta ln(theta)
//   GeneralizedPM   Psi = k1 theta rho^alpha  - k2 rho theta^beta
//
// entropy eta = -dPsi/dtheta, internal energy e = Psi + eta theta and
// pressure p = rho dPsi/drho - Psi.

#include <cmath>
#include <string>
#include <variant>

#include "thermoflux/error.hpp"
#include "thermoflux/grid.hpp"

namespace thermoflux {

enum class ModelKind { IdealGas, PorousMedia, GeneralizedPM };

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::IdealGas: return "ideal_gas";
    case ModelKind::PorousMedia: return "porous_media";
    case ModelKind::GeneralizedPM: return "generalized_pm";
  }
  return "?";
}

/// kappa3 = kappa1 * kappa2 * d_tilde * theta * rho
struct IdealGasLaw {
  double d_tilde;
  bool operator==(const IdealGasLaw&) const = default;
};

/// kappa3 = (alpha - 1) * d * theta
struct PMLaw {
  double d;
  bool operator==(const PMLaw&) const = default;
};

/// kappa3 = k
struct ConstantConductivity {
  double k;
  bool operator==(const ConstantConductivity&) const = default;
};

using Conductivity = std::variant<IdealGasLaw, PMLaw, ConstantConductivity>;

struct ModelParams {
  ModelKind kind = ModelKind::IdealGas;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double alpha = 0.0;     // PorousMedia, GeneralizedPM
  double beta_exp = 0.0;  // GeneralizedPM
  Conductivity conductivity = IdealGasLaw{1.0};

  static ModelParams ideal_gas(double kappa1, double kappa2, Conductivity c) {
    ModelParams m{ModelKind::IdealGas, kappa1, kappa2, 0.0, 0.0, c};
    m.validate();
    return m;
  }
  static ModelParams porous_media(double kappa1, double kappa2, double alpha, Conductivity c) {
    ModelParams m{ModelKind::PorousMedia, kappa1, kappa2, alpha, 0.0, c};
    m.validate();
    return m;
  }
  static ModelParams generalized_pm(double k1, double k2, double alpha, double beta,
                                    Conductivity c) {
    ModelParams m{ModelKind::GeneralizedPM, k1, k2, alpha, beta, c};
    m.validate();
    return m;
  }

  /// a = alpha - 1
  double a() const noexcept { return alpha - 1.0; }

  /// beta = 1 + kappa1 / kappa2, the ideal-gas exponent parameter.
  double beta_ig() const noexcept { return 1.0 + kappa1 / kappa2; }

  bool uses_alpha() const noexcept { return kind != ModelKind::IdealGas; }

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(kappa1)) throw ConfigError("kappa1 > 0 required");
    if (!positive(kappa2)) throw ConfigError("kappa2 > 0 required");
    if (uses_alpha() && !(alpha > 1.0 && std::isfinite(alpha))) {
      throw ConfigError("alpha > 1 required");
    }
    if (kind == ModelKind::GeneralizedPM && !(beta_exp > 1.0 && std::isfinite(beta_exp))) {
      throw ConfigError("beta > 1 required");
    }
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, IdealGasLaw>) {
            if (!positive(c.d_tilde)) throw ConfigError("d_tilde > 0 required");
          } else if constexpr (std::is_same_v<T, PMLaw>) {
            if (!positive(c.d)) throw ConfigError("d > 0 required");
            if (!uses_alpha()) throw ConfigError("pm_law conductivity needs alpha (porous media models)");
          } else {
            if (!positive(c.k)) throw ConfigError("conductivity constant k > 0 required");
          }
        },
        conductivity);
  }

  /// Material conductivity at one state.
  double kappa3(double rho, double theta) const noexcept {
    return std::visit(
        [&](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, IdealGasLaw>) {
            return kappa1 * kappa2 * c.d_tilde * theta * rho;
          } else if constexpr (std::is_same_v<T, PMLaw>) {
            return (alpha - 1.0) * c.d * theta;
          } else {
            return c.k;
          }
        },
        conductivity);
  }

  bool operator==(const ModelParams&) const = default;
};

struct ThermoPoint {
  double psi;        // free energy density
  double eta;        // entropy
  double e;          // internal energy
  double p;          // pressure
  double dp_dtheta;  // d p / d theta at fixed rho
  double eta_theta;  // d eta / d theta at fixed rho
  double kappa3;     // conductivity
};

namespace detail {

inline void require_positive_state(double rho, double theta) {
  if (!(rho > 0.0)) throw DomainError("density must be positive, got " + std::to_string(rho));
  if (!(theta > 0.0)) {
    throw DomainError("temperature must be positive, got " + std::to_string(theta));
  }
}

}  // namespace detail

inline double free_energy(const ModelParams& m, double rho, double theta) {
  detail::require_positive_state(rho, theta);
  switch (m.kind) {
    case ModelKind::IdealGas:
      return m.kappa1 * theta * rho * std::log(rho) - m.kappa2 * rho * theta * std::log(theta);
    case ModelKind::PorousMedia:
      return m.kappa1 * theta * std::pow(rho, m.alpha) - m.kappa2 * rho * theta * std::log(theta);
    case ModelKind::GeneralizedPM:
      return m.kappa1 * theta * std::pow(rho, m.alpha) -
             m.kappa2 * rho * std::pow(theta, m.beta_exp);
  }
  return 0.0;
}

/// Pressure only; the solver's inner loops need nothing else.
inline double pressure(const ModelParams& m, double rho, double theta) noexcept {
  switch (m.kind) {
    case ModelKind::IdealGas: return m.kappa1 * rho * theta;
    case ModelKind::PorousMedia:
    case ModelKind::GeneralizedPM: return m.kappa1 * m.a() * theta * std::pow(rho, m.alpha);
  }
  return 0.0;
}

inline ThermoPoint eval_thermo(const ModelParams& m, double rho, double theta) {
  m.validate();
  detail::require_positive_state(rho, theta);
  ThermoPoint tp{};
  tp.psi = free_energy(m, rho, theta);
  tp.p = pressure(m, rho, theta);
  tp.kappa3 = m.kappa3(rho, theta);
  switch (m.kind) {
    case ModelKind::IdealGas:
      tp.eta = -m.kappa1 * rho * std::log(rho) + m.kappa2 * rho * (std::log(theta) + 1.0);
      tp.dp_dtheta = m.kappa1 * rho;
      tp.eta_theta = m.kappa2 * rho / theta;
      break;
    case ModelKind::PorousMedia:
      tp.eta = -m.kappa1 * std::pow(rho, m.alpha) + m.kappa2 * rho * (std::log(theta) + 1.0);
      tp.dp_dtheta = m.kappa1 * m.a() * std::pow(rho, m.alpha);
      tp.eta_theta = m.kappa2 * rho / theta;
      break;
    case ModelKind::GeneralizedPM: {
      const double b = m.beta_exp;
      tp.eta = -m.kappa1 * std::pow(rho, m.alpha) + m.kappa2 * b * rho * std::pow(theta, b - 1.0);
      tp.dp_dtheta = m.kappa1 * m.a() * std::pow(rho, m.alpha);
      tp.eta_theta = m.kappa2 * b * (b - 1.0) * rho * std::pow(theta, b - 2.0);
      break;
    }
  }
  tp.e = tp.psi + tp.eta * theta;
  return tp;
}

/// Pointwise pressure field.
inline ScalarField pressure_field(const ModelParams& m, const ScalarField& rho,
                                  const ScalarField& theta) {
  return zip_with(rho, theta, [&](double r, double t) { return pressure(m, r, t); });
}

/// Darcy velocity u = -grad(p) / rho with a central-difference gradient.
inline VectorField darcy_velocity(const ModelParams& m, const ScalarField& rho,
                                  const ScalarField& theta) {
  rho.require_same_grid(theta);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) {
      throw DegenerateStateError("darcy_velocity: density " + std::to_string(rho[i]) +
                                 " at node " + std::to_string(i));
    }
  }
  VectorField u = gradient(pressure_field(m, rho, theta));
  for (auto& component : u) {
    for (std::size_t i = 0; i < rho.size(); ++i) component[i] = -component[i] / rho[i];
  }
  return u;
}

}  // namespace thermoflux
