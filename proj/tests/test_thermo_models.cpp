#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "thermoflux/thermo_models.hpp"

using namespace thermoflux;

namespace {

std::vector<ModelParams> models() {
  return {ModelParams::ideal_gas(1.3, 0.7, IdealGasLaw{2.0}),
          ModelParams::porous_media(0.9, 1.4, 2.5, PMLaw{0.8}),
          ModelParams::generalized_pm(1.1, 0.6, 1.7, 2.3, ConstantConductivity{0.5})};
}

// Central differences of the free energy, the only model input.
double dpsi_dtheta(const ModelParams& m, double r, double t, double eps = 1e-5) {
  return (free_energy(m, r, t + eps) - free_energy(m, r, t - eps)) / (2 * eps);
}
double dpsi_drho(const ModelParams& m, double r, double t, double eps = 1e-5) {
  return (free_energy(m, r + eps, t) - free_energy(m, r - eps, t)) / (2 * eps);
}

}  // namespace

TEST(EvalThermo, IdealGasAtUnitState) {
  const auto tp = eval_thermo(ModelParams::ideal_gas(1, 1, IdealGasLaw{1}), 1.0, 1.0);
  EXPECT_DOUBLE_EQ(tp.p, 1.0);
  EXPECT_DOUBLE_EQ(tp.dp_dtheta, 1.0);
  EXPECT_DOUBLE_EQ(tp.eta_theta, 1.0);
  EXPECT_DOUBLE_EQ(tp.eta, 1.0);
  EXPECT_DOUBLE_EQ(tp.psi, 0.0);
  EXPECT_DOUBLE_EQ(tp.kappa3, 1.0);
}

TEST(EvalThermo, PorousMediaAndGeneralizedExamples) {
  const auto pm = eval_thermo(ModelParams::porous_media(1, 1, 2, PMLaw{1}), 2.0, 1.0);
  EXPECT_DOUBLE_EQ(pm.p, 4.0);
  EXPECT_DOUBLE_EQ(pm.dp_dtheta, 4.0);
  EXPECT_DOUBLE_EQ(pm.eta_theta, 2.0);
  EXPECT_DOUBLE_EQ(pm.kappa3, 1.0);
  const auto gpm = eval_thermo(ModelParams::generalized_pm(1, 1, 2, 2, ConstantConductivity{3}), 1.0, 2.0);
  EXPECT_DOUBLE_EQ(gpm.eta_theta, 2.0);
  EXPECT_DOUBLE_EQ(gpm.kappa3, 3.0);
}

TEST(EvalThermo, DerivedQuantitiesAgainstFiniteDifferences) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (const auto& m : models()) {
    for (int i = 0; i < 200; ++i) {
      const double r = u(gen);
      const double t = u(gen);
      const auto tp = eval_thermo(m, r, t);
      const double scale = 1.0 + std::abs(tp.psi);
      EXPECT_NEAR(tp.eta, -dpsi_dtheta(m, r, t), 1e-6 * scale);
      EXPECT_NEAR(tp.p, dpsi_drho(m, r, t) * r - tp.psi, 1e-6 * (scale + std::abs(tp.p)));
      EXPECT_NEAR(tp.e, tp.psi + tp.eta * t, 1e-12 * std::max(1.0, std::abs(tp.e)));
      // dp/dtheta = eta - rho d(eta)/d(rho)
      const double eps = 1e-5;
      const double eta_r = (eval_thermo(m, r + eps, t).eta - eval_thermo(m, r - eps, t).eta) / (2 * eps);
      EXPECT_NEAR(tp.dp_dtheta, tp.eta - r * eta_r, 1e-6 * (1 + std::abs(tp.dp_dtheta)));
      const double eta_t = (eval_thermo(m, r, t + eps).eta - eval_thermo(m, r, t - eps).eta) / (2 * eps);
      EXPECT_NEAR(tp.eta_theta, eta_t, 1e-6 * (1 + std::abs(tp.eta_theta)));
    }
  }
}

TEST(EvalThermo, DomainAndConfigErrors) {
  const auto m = ModelParams::ideal_gas(1, 1, IdealGasLaw{1});
  EXPECT_THROW(eval_thermo(m, 0.0, 1.0), DomainError);
  EXPECT_THROW(eval_thermo(m, 1.0, -1.0), DomainError);
  try {
    ModelParams::porous_media(1, 1, 1.0, PMLaw{1});
    FAIL() << "alpha = 1 accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha > 1"), std::string::npos);
  }
  EXPECT_THROW(ModelParams::ideal_gas(0, 1, IdealGasLaw{1}), ConfigError);
  EXPECT_THROW(ModelParams::ideal_gas(1, 1, IdealGasLaw{0}), ConfigError);
  EXPECT_THROW(ModelParams::ideal_gas(1, 1, PMLaw{1}), ConfigError);
  EXPECT_THROW(ModelParams::generalized_pm(1, 1, 2, 1.0, ConstantConductivity{1}), ConfigError);
}

TEST(Conductivity, Laws) {
  const auto ig = ModelParams::ideal_gas(2, 3, IdealGasLaw{0.5});
  EXPECT_DOUBLE_EQ(ig.kappa3(4.0, 5.0), 2 * 3 * 0.5 * 5.0 * 4.0);
  const auto pm = ModelParams::porous_media(2, 3, 2.5, PMLaw{0.4});
  EXPECT_DOUBLE_EQ(pm.kappa3(4.0, 5.0), 1.5 * 0.4 * 5.0);
  EXPECT_DOUBLE_EQ(ig.beta_ig(), 1.0 + 2.0 / 3.0);
}

TEST(DarcyVelocity, UniformStateIsAtRest) {
  const PeriodicGrid g(2, 8, 1.0);
  for (const auto& m : models()) {
    const auto u = darcy_velocity(m, ScalarField(g, 2.0), ScalarField(g, 0.5));
    for (const auto& c : u) {
      for (double v : c.values()) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(DarcyVelocity, IdealGasAgainstAnalyticGradient) {
  const double L = 1.0;
  const double k = 2 * std::numbers::pi / L;
  const auto m = ModelParams::ideal_gas(1.5, 1, IdealGasLaw{1});
  double prev = 0.0;
  for (int n : {64, 128}) {
    const PeriodicGrid g(1, n, L);
    const auto theta = ScalarField::sample(g, [&](double x) { return 1 + 0.1 * std::sin(k * x); });
    const auto u = darcy_velocity(m, ScalarField(g, 1.0), theta);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double exact = -1.5 * 0.1 * k * std::cos(k * g.coordinate(i, 0));
      err = std::max(err, std::abs(u[0][i] - exact));
    }
    EXPECT_LT(err, 2.0 * k * k * k * 0.15 * (L / n) * (L / n));
    if (prev > 0) {
      EXPECT_NEAR(prev / err, 4.0, 0.2);
    }
    prev = err;
  }
}

TEST(DarcyVelocity, PorousMediaMatchesIndependentEvaluation) {
  const auto m = ModelParams::porous_media(1.3, 1, 2, PMLaw{1});
  const PeriodicGrid g(2, 12, 2.0);
  const auto rho = ScalarField::sample(g, [](double x, double y) { return 1 + 0.3 * std::sin(3 * x + y); });
  const auto theta = ScalarField::sample(g, [](double x, double y) { return 2 + std::cos(x - 2 * y); });
  const auto u = darcy_velocity(m, rho, theta);
  const double h = g.spacing();
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int axis = 0; axis < 2; ++axis) {
      const auto ip = g.neighbor(i, axis, 1);
      const auto im = g.neighbor(i, axis, -1);
      const double q_plus = theta[ip] * rho[ip] * rho[ip];
      const double q_minus = theta[im] * rho[im] * rho[im];
      const double expected = -1.3 * (q_plus - q_minus) / (2 * h) / rho[i];
      EXPECT_NEAR(u[axis][i], expected, 1e-13 * (1 + std::abs(expected)));
    }
  }
}

TEST(DarcyVelocity, DegenerateDensity) {
  const PeriodicGrid g(1, 8, 1.0);
  ScalarField rho(g, 1.0);
  rho[3] = 0.0;
  EXPECT_THROW(darcy_velocity(ModelParams::ideal_gas(1, 1, IdealGasLaw{1}), rho, ScalarField(g, 1.0)),
               DegenerateStateError);
}
