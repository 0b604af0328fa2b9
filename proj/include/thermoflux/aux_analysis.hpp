#pragma once

// Auxiliary-variable machinery behind the extremum principles.
//
// Ideal gas with kappa3 = k1 k2 D theta rho: the weights f = rho^gamma with
// gamma^2 + (beta + D) gamma + D = 0 make theta rho^(1+gamma) satisfy a
// scalar maximum (gamma+) or minimum (gamma-) principle. The sign of the
// remaining gradient coefficient G = c f rho decides which.
//
// Porous media with kappa3 = a D theta, after the rescaling rho -> k1^(1/a) rho:
// the log-derivative Psi = f'/f solves the quadratic
//   k2 rho^(a+3) Psi^2 + ((a rho^a - k2 a + k2) rho^(a+2) + D rho) Psi
//     + D - a (k2 + a rho^a) rho^(a+1) = 0,
// giving two branches Psi+ > Psi-. The weights f = exp(int Psi) are only
// available numerically, and the sign of the gradient coefficient G(rho)
// changes across density thresholds.
//
// Everything in the porous-media part is homogeneous in (D, k2 rho^(a+1),
// rho^(2a+1)); evaluating in those normalised variables keeps intermediate
// values in range and lets the cancelling branch be rationalised.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "thermoflux/error.hpp"
#include "thermoflux/quadrature.hpp"
#include "thermoflux/thermo_models.hpp"

namespace thermoflux {

enum class Branch { Plus, Minus };

inline const char* to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

// ---------------------------------------------------------------------------
// Ideal gas

struct IdealGasExponents {
  double kappa1;
  double beta;      // 1 + k1 / k2
  double d_tilde;
  double gamma_plus;
  double gamma_minus;
  double disc;      // beta^2 + 2 (beta - 2) D + D^2
  double c_plus;    // G+ = c_plus * f * rho
  double c_minus;   // G- = c_minus * f * rho
};

/// Gradient coefficient per unit f rho in its first reduced form,
///   k1 ( -(2+g) D / (g (1+g)) + (D + beta - 2) g / (1+g) - 2 beta / (1+g) ).
/// Kept for cross-checking the closed form used by gamma_exponents().
inline double gtilde_ideal_coefficient(double kappa1, double beta, double d_tilde, double gamma) {
  const double one_plus = 1.0 + gamma;
  return kappa1 * (-(2.0 + gamma) * d_tilde / (gamma * one_plus) +
                   (d_tilde + beta - 2.0) * gamma / one_plus - 2.0 * beta / one_plus);
}

inline IdealGasExponents gamma_exponents(double kappa1, double kappa2, double d_tilde) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0) || !(d_tilde > 0.0)) {
    throw ConfigError("gamma_exponents: kappa1, kappa2 and d_tilde must be positive");
  }
  IdealGasExponents ex{};
  ex.kappa1 = kappa1;
  ex.beta = 1.0 + kappa1 / kappa2;
  ex.d_tilde = d_tilde;
  const double sum = ex.beta + d_tilde;
  // Sum of squares form; never negative.
  const double shifted = d_tilde + ex.beta - 2.0;
  ex.disc = shifted * shifted + 4.0 * (ex.beta - 1.0);
  const double root = std::sqrt(ex.disc);

  // gamma- has no cancellation; gamma+ follows from the product of the roots.
  long double gm = -0.5L * (static_cast<long double>(sum) + root);
  long double gp = static_cast<long double>(d_tilde) / gm;
  auto polish = [&](long double g) {
    const long double q = g * (g + sum) + d_tilde;
    const long double dq = 2.0L * g + sum;
    return g - q / dq;
  };
  gm = polish(gm);
  gp = polish(gp);
  ex.gamma_plus = static_cast<double>(gp);
  ex.gamma_minus = static_cast<double>(gm);

  // (1 + g+)(1 + g-) = 1 - beta = -k1/k2; take the larger factor directly.
  long double one_p = 1.0L + gp;
  long double one_m = 1.0L + gm;
  const long double product = -static_cast<long double>(kappa1) / kappa2;
  if (std::abs(one_p) < std::abs(one_m)) {
    one_p = product / one_m;
  } else {
    one_m = product / one_p;
  }
  // With g^2 = -(D + (beta + D) g) the bracket D (1+g) + beta g equals -g^2, so
  // G = -k1 g^2 / (1 + g) * f rho.
  ex.c_plus = static_cast<double>(-kappa1 * gp * gp / one_p);
  ex.c_minus = static_cast<double>(-kappa1 * gm * gm / one_m);
  return ex;
}

struct IdealGasSigns {
  int sign_plus;
  int sign_minus;
  double c_plus;
  double c_minus;
};

/// Signs of G+ and G-; always (negative, positive). Anything else means a bug.
inline IdealGasSigns gtilde_ideal_signs(const IdealGasExponents& ex) {
  auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
  IdealGasSigns s{sgn(ex.c_plus), sgn(ex.c_minus), ex.c_plus, ex.c_minus};
  if (s.sign_plus != -1 || s.sign_minus != 1) {
    std::ostringstream msg;
    msg << "ideal-gas gradient coefficients have signs (" << s.sign_plus << ", " << s.sign_minus
        << ") for beta=" << ex.beta << " d_tilde=" << ex.d_tilde << "; expected (-1, +1)";
    throw AnalysisInconsistency(msg.str());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Porous media

struct PMBranchParams {
  double a;       // alpha - 1
  double kappa2;
  double d;       // conductivity constant in the rescaled system

  void validate() const {
    if (!(a > 0.0) || !(kappa2 > 0.0) || !(d > 0.0) || !std::isfinite(a) ||
        !std::isfinite(kappa2) || !std::isfinite(d)) {
      throw ConfigError("branch parameters a, kappa2, d must be positive and finite");
    }
  }

  /// From a porous-media model with kappa3 = a D theta. Rescaling
  /// rho -> k1^(1/a) rho multiplies the conductivity by k1^(1/a).
  static PMBranchParams from_model(const ModelParams& m) {
    if (m.kind != ModelKind::PorousMedia) {
      throw ConfigError("branch analysis applies to the porous media model only");
    }
    const auto* law = std::get_if<PMLaw>(&m.conductivity);
    if (law == nullptr) throw ConfigError("branch analysis needs kappa3 = a D theta (pm_law)");
    PMBranchParams p{m.a(), m.kappa2, std::pow(m.kappa1, 1.0 / m.a()) * law->d};
    p.validate();
    return p;
  }
};

/// rho -> k1^(1/a) rho, the density the branch analysis is expressed in.
inline double rescale_density(const ModelParams& m, double rho) {
  return std::pow(m.kappa1, 1.0 / m.a()) * rho;
}

namespace detail {

// D, K = k2 rho^(a+1), U = rho^(2a+1) divided by sigma = D + K + U.
struct BranchTerms {
  double a;
  double d, K, U;
  double sigma;
  double S;       // sqrt of the normalised discriminant
  double Bp;      // a U + (1 - a) K + d
  double C;       // d - a K - a^2 U
  double spdy;    // S + d + a U - (a+1) K, always > 0
  double p_plus;  // rho Psi+
  double p_minus; // rho Psi-
  double p_plus_1;
  double p_minus_1;
};

inline BranchTerms branch_terms(double rho, const PMBranchParams& p) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("branch analysis needs rho > 0, got " + std::to_string(rho));
  }
  const double a = p.a;
  const double lr = std::log(rho);
  const double ld = std::log(p.d);
  const double lk = std::log(p.kappa2) + (a + 1.0) * lr;
  const double lu = (2.0 * a + 1.0) * lr;
  const double top = std::max({ld, lk, lu});
  const double ed = std::exp(ld - top);
  const double ek = std::exp(lk - top);
  const double eu = std::exp(lu - top);
  const double norm = ed + ek + eu;

  BranchTerms t{};
  t.a = a;
  t.d = ed / norm;
  t.K = ek / norm;
  t.U = eu / norm;
  t.sigma = std::exp(top) * norm;
  const double y = a * t.U - (a + 1.0) * t.K;
  const double cross = 4.0 * a * (a + 1.0) * t.K * t.U;
  const double dy = t.d + y;
  t.S = std::sqrt(dy * dy + cross);
  t.Bp = a * t.U + (1.0 - a) * t.K + t.d;
  t.C = t.d - a * t.K - a * a * t.U;
  t.spdy = dy >= 0.0 ? t.S + dy : cross / (t.S - dy);
  if (t.Bp >= 0.0) {
    t.p_plus = 2.0 * (a * a * t.U + a * t.K - t.d) / (t.Bp + t.S);
    t.p_minus = -(t.Bp + t.S) / (2.0 * t.K);
  } else {
    t.p_plus = (t.S - t.Bp) / (2.0 * t.K);
    t.p_minus = 2.0 * t.C / (t.S - t.Bp);
  }
  t.p_minus_1 = -t.spdy / (2.0 * t.K);
  t.p_plus_1 = 2.0 * a * (a + 1.0) * t.U / t.spdy;
  return t;
}

}  // namespace detail

struct BranchValues {
  double psi_plus;
  double psi_minus;
  double discriminant;
};

/// Both roots Psi+- of the weight quadratic and its discriminant
///   (D + rho^(a+1) (a rho^a - k2 (a+1)))^2 + 4 k2 a (a+1) rho^(3a+2).
inline BranchValues psi_branches(double rho, const PMBranchParams& p) {
  const auto t = detail::branch_terms(rho, p);
  return {t.p_plus / rho, t.p_minus / rho, (t.S * t.sigma) * (t.S * t.sigma)};
}

/// rho * Psi(rho) = d ln f / d ln rho.
inline double log_slope(Branch b, double rho, const PMBranchParams& p) {
  const auto t = detail::branch_terms(rho, p);
  return b == Branch::Plus ? t.p_plus : t.p_minus;
}

inline double psi_branch(Branch b, double rho, const PMBranchParams& p) {
  return log_slope(b, rho, p) / rho;
}

/// d Psi / d rho by implicit differentiation of the quadratic,
/// Psi' = -(dQ/drho) / (dQ/dPsi); dQ/dPsi = +-rho sqrt(Delta) never vanishes.
inline double psi_derivative(Branch b, double rho, const PMBranchParams& p) {
  const auto t = detail::branch_terms(rho, p);
  const double a = t.a;
  const double s = b == Branch::Plus ? t.p_plus : t.p_minus;
  const double dq_dp = b == Branch::Plus ? t.S : -t.S;
  if (!(t.S > 0.0)) throw AnalysisInconsistency("double root in the weight quadratic");
  // rho dq/drho in the normalised variables: K and U scale like rho^(a+1) and rho^(2a+1).
  const double rho_dq = (a + 1.0) * (t.K * s * s + (a * t.U + (1.0 - a) * t.K) * s - a * t.K -
                                     a * a * t.U) +
                        a * (a * t.U * s - a * a * t.U);
  const double rho_ds = -rho_dq / dq_dp;
  return (rho_ds - s) / (rho * rho);
}

/// Relative residual |Q| / sum |terms| of the quadratic at (rho, psi).
inline double implicit_quadratic_residual(double rho, double psi, const PMBranchParams& p) {
  const double a = p.a;
  const double k2 = p.kappa2;
  const double D = p.d;
  const double terms[] = {
      k2 * std::pow(rho, a + 3.0) * psi * psi,
      a * std::pow(rho, 2.0 * a + 2.0) * psi,
      k2 * (1.0 - a) * std::pow(rho, a + 2.0) * psi,
      D * rho * psi,
      D,
      -a * k2 * std::pow(rho, a + 1.0),
      -a * a * std::pow(rho, 2.0 * a + 1.0),
  };
  double sum = 0.0;
  double scale = 0.0;
  for (double v : terms) {
    sum += v;
    scale += std::abs(v);
  }
  return std::abs(sum) / scale;
}

namespace detail {

// Homogeneous polynomials in (d, K, U) from reducing G (f = 1) modulo the
// branch quadratic: G (p+1)^2 q'(p) = (a / K)(-Q0 + s P1 S) / 2 and
// Q0^2 - P1^2 S^2 = -4 a (a+1)^2 d K^3 U R.
inline double poly_p1(double a, double d, double K, double U) {
  const double lead = a * U + (a + 1.0) * K;
  return d * d * d + d * d * (-3.0 * a * K + 3.0 * a * U - 2.0 * K) +
         d * (a * a * K * K - a * a * K * U + 3.0 * a * a * U * U + a * K * K) + a * U * lead * lead;
}

inline double poly_q0(double a, double d, double K, double U) {
  const double a2 = a * a;
  const double a3 = a2 * a;
  const double lead = a * U + (a + 1.0) * K;
  return d * d * d * d + d * d * d * (-4.0 * a * K + 4.0 * a * U - 3.0 * K) +
         d * d * (4.0 * a2 * K * K + 6.0 * a2 * U * U + 6.0 * a * K * K + 2.0 * K * K -
                  (5.0 * a2 + 3.0 * a) * K * U) +
         d * (-(a3 + 2.0 * a2 + a) * K * K * K + 4.0 * a3 * U * U * U +
              (2.0 * a3 + 3.0 * a2) * K * U * U - (a3 + 2.0 * a2 + a) * K * K * U) +
         U * a * lead * lead * lead;
}

inline double poly_r(double a, double d, double K, double U) {
  const double a2 = a * a;
  const double a3 = a2 * a;
  const double lead = a * U + (a + 1.0) * K;
  return -2.0 * (a + 1.0) * d * d * d +
         d * d * ((7.0 * a2 + 12.0 * a + 5.0) * K - (3.0 * a2 + 4.0 * a) * U) +
         d * (-(5.0 * a3 + 12.0 * a2 + 9.0 * a + 2.0) * K * K - 2.0 * a2 * U * U -
              (6.0 * a3 + 9.0 * a2 + 4.0 * a) * K * U) +
         a * lead * lead * lead;
}

}  // namespace detail

/// Gradient coefficient G of the porous-media extremum argument for weight f
/// normalised to 1 at rho (G is linear in f). Positive: minimum principle for
/// f rho theta near rho; negative: maximum principle.
///
/// The direct expression loses up to ~rho^(+-(2a+2)) relative accuracy to
/// cancellation on the plus branch; this evaluates the same quantity after
/// reduction modulo the branch quadratic, rationalising whichever of
/// -Q0 +- P1 S cancels.
inline double gtilde_pm(Branch b, double rho, const PMBranchParams& p) {
  const auto t = detail::branch_terms(rho, p);
  if (!(t.S > 0.0)) throw AnalysisInconsistency("double root in the weight quadratic");
  const double a = t.a;
  const double s = b == Branch::Plus ? 1.0 : -1.0;
  const double p1 = detail::poly_p1(a, t.d, t.K, t.U);
  const double q0 = detail::poly_q0(a, t.d, t.K, t.U);
  const double p1s = s * p1 * t.S;
  double numerator = -q0 + p1s;
  if ((q0 > 0.0) == (p1s > 0.0)) {
    const double r = detail::poly_r(a, t.d, t.K, t.U);
    numerator = 4.0 * a * (a + 1.0) * (a + 1.0) * t.d * t.K * t.K * t.K * t.U * r / (q0 + p1s);
  }
  const double one_plus = b == Branch::Plus ? t.p_plus_1 : t.p_minus_1;
  return a * t.sigma * numerator / (2.0 * t.K * t.K * one_plus * one_plus * s * t.S);
}

/// The unreduced gradient coefficient with f = 1, f' = Psi, f'' = Psi' + Psi^2:
///   -a (k2 rho^a (f' rho + f)/f + a rho^2a + D/rho)((f'' rho + 2f') f^2 rho^2/(f' rho + f)^2 - 2 f rho)
///   + 2 a^3 (a+1) rho^(2a+1) f^3/(f' rho + f)^2
///   + (k2 a (a^2 - 1) rho^(a+1) - a^2 (4a+3) rho^(2a+1)) f^2/(f' rho + f)
///   + (a^2 rho^(2a+1) - k2 a (2a+1) rho^(a+1) + a D) f.
/// Only trustworthy where the terms do not cancel (roughly 0.1 < rho < 10).
inline double gtilde_pm_closed_form(Branch b, double rho, const PMBranchParams& p) {
  const double a = p.a;
  const double k2 = p.kappa2;
  const double D = p.d;
  const double f = 1.0;
  const double fp = psi_branch(b, rho, p);
  const double fpp = psi_derivative(b, rho, p) + fp * fp;
  const double ra = std::pow(rho, a);
  const double r2a1 = std::pow(rho, 2.0 * a + 1.0);
  const double ra1 = std::pow(rho, a + 1.0);
  const double w = fp * rho + f;
  const double t1 = -a * (k2 * ra * w / f + a * ra * ra + D / rho) *
                    ((fpp * rho + 2.0 * fp) / (w * w) * f * f * rho * rho - 2.0 * f * rho);
  const double t2 = 2.0 * a * a * a * (a + 1.0) * r2a1 / (w * w) * f * f * f;
  const double t3 = (k2 * a * (a * a - 1.0) * ra1 - a * a * (4.0 * a + 3.0) * r2a1) / w * f * f;
  const double t4 = (a * a * r2a1 - k2 * a * (2.0 * a + 1.0) * ra1 + a * D) * f;
  return t1 + t2 + t3 + t4;
}

// ---------------------------------------------------------------------------
// Weight functions

struct WeightTable {
  Branch branch = Branch::Plus;
  double rho0 = 1.0;
  double f0 = 1.0;
  std::vector<double> rho;   // ascending
  std::vector<double> ln_f;  // ln f(rho); f itself overflows for the minus branch near 0
  std::vector<double> psi;   // Psi_branch(rho)

  std::size_t size() const noexcept { return rho.size(); }
  double f(std::size_t i) const { return std::exp(ln_f[i]); }

  /// ln f at an arbitrary density inside the table, by cubic Hermite
  /// interpolation in ln(rho) using the exact slopes rho Psi.
  double ln_f_at(double r) const {
    if (rho.empty()) throw DomainError("empty weight table");
    if (!(r >= rho.front() && r <= rho.back())) {
      std::ostringstream msg;
      msg << "rho " << r << " outside weight table [" << rho.front() << ", " << rho.back() << "]";
      throw DomainError(msg.str());
    }
    if (rho.size() == 1) return ln_f.front();
    auto hi = std::upper_bound(rho.begin(), rho.end(), r);
    if (hi == rho.end()) --hi;
    const auto j = static_cast<std::size_t>(hi - rho.begin());
    const std::size_t i = j - 1;
    const double s0 = std::log(rho[i]);
    const double s1 = std::log(rho[j]);
    const double hs = s1 - s0;
    const double x = (std::log(r) - s0) / hs;
    const double m0 = rho[i] * psi[i] * hs;
    const double m1 = rho[j] * psi[j] * hs;
    const double x2 = x * x;
    const double x3 = x2 * x;
    return (2 * x3 - 3 * x2 + 1) * ln_f[i] + (x3 - 2 * x2 + x) * m0 + (-2 * x3 + 3 * x2) * ln_f[j] +
           (x3 - x2) * m1;
  }
};

/// Tabulates f(rho) = f0 exp(int_{rho0}^{rho} Psi_branch(r) dr) at the targets.
/// The integral is taken in ln(rho), where the integrand is rho Psi, segment by
/// segment outward from rho0.
inline WeightTable weight_function(Branch b, const PMBranchParams& p, double rho0, double f0,
                                   std::vector<double> targets,
                                   const QuadratureOptions& quad = {1e-10, 0.0, 4000}) {
  p.validate();
  if (!(rho0 > 0.0)) throw DomainError("weight_function: rho0 must be positive");
  if (!(f0 > 0.0)) throw DomainError("weight_function: f0 must be positive");
  for (double r : targets) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("weight_function: targets must be positive");
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  WeightTable table;
  table.branch = b;
  table.rho0 = rho0;
  table.f0 = f0;
  table.rho = targets;
  table.ln_f.assign(targets.size(), 0.0);
  table.psi.resize(targets.size());

  auto integrand = [&](double s) { return log_slope(b, std::exp(s), p); };
  const double ln_f0 = std::log(f0);
  const auto split = static_cast<std::size_t>(
      std::lower_bound(targets.begin(), targets.end(), rho0) - targets.begin());

  double acc = ln_f0;
  double prev = std::log(rho0);
  for (std::size_t i = split; i < targets.size(); ++i) {
    const double s = std::log(targets[i]);
    acc += integrate(integrand, prev, s, quad).value;
    table.ln_f[i] = acc;
    prev = s;
  }
  acc = ln_f0;
  prev = std::log(rho0);
  for (std::size_t i = split; i-- > 0;) {
    const double s = std::log(targets[i]);
    acc += integrate(integrand, prev, s, quad).value;
    table.ln_f[i] = acc;
    prev = s;
  }
  for (std::size_t i = 0; i < targets.size(); ++i) table.psi[i] = psi_branch(b, targets[i], p);
  return table;
}

/// n log-spaced densities covering [lo, hi].
inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_space needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double l0 = std::log10(lo);
  const double l1 = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

// ---------------------------------------------------------------------------
// Density thresholds

struct ThresholdScanOptions {
  double rho_min = 1e-6;
  double rho_max = 1e6;
  std::size_t points = 200;
  double rel_tol = 1e-8;
};

struct Thresholds {
  double rho_bar = 0.0;    // largest zero of G+: above it G+ > 0 (high-density case)
  double rho_under = 0.0;  // smallest zero of G+: below it G+ < 0 (low-density case)
  bool g_minus_positive = false;  // G- > 0 at every scan point
  std::vector<double> zeros;
  std::vector<double> scan_rho;
  std::vector<int> plus_signs;
  std::vector<int> minus_signs;
};

inline Thresholds find_thresholds(const PMBranchParams& p, const ThresholdScanOptions& opt = {}) {
  p.validate();
  auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
  Thresholds th;
  th.scan_rho = log_space(opt.rho_min, opt.rho_max, opt.points);
  th.plus_signs.reserve(opt.points);
  th.minus_signs.reserve(opt.points);
  for (double r : th.scan_rho) {
    th.plus_signs.push_back(sgn(gtilde_pm(Branch::Plus, r, p)));
    th.minus_signs.push_back(sgn(gtilde_pm(Branch::Minus, r, p)));
  }
  th.g_minus_positive =
      std::all_of(th.minus_signs.begin(), th.minus_signs.end(), [](int s) { return s > 0; });

  for (std::size_t i = 0; i < th.scan_rho.size(); ++i) {
    if (th.plus_signs[i] == 0) th.zeros.push_back(th.scan_rho[i]);
    if (i + 1 == th.scan_rho.size()) break;
    if (th.plus_signs[i] * th.plus_signs[i + 1] >= 0) continue;
    double lo = th.scan_rho[i];
    double hi = th.scan_rho[i + 1];
    const int sign_lo = th.plus_signs[i];
    while (hi / lo - 1.0 > opt.rel_tol) {
      const double mid = std::sqrt(lo * hi);
      const int sm = sgn(gtilde_pm(Branch::Plus, mid, p));
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      (sm == sign_lo ? lo : hi) = mid;
    }
    th.zeros.push_back(std::sqrt(lo * hi));
  }
  if (th.zeros.empty()) {
    std::ostringstream msg;
    msg << "G+ has no sign change on [" << opt.rho_min << ", " << opt.rho_max << "]";
    throw ThresholdNotFound(msg.str(), th.scan_rho, th.plus_signs);
  }
  th.rho_under = th.zeros.front();
  th.rho_bar = th.zeros.back();
  return th;
}

/// Density where Psi+ changes sign (the minimum of f+):
/// a^2 rho^(2a+1) + k2 a rho^(a+1) = D.
inline double plus_branch_minimum(const PMBranchParams& p) {
  p.validate();
  auto lhs = [&](double r) {
    return p.a * p.a * std::pow(r, 2.0 * p.a + 1.0) + p.kappa2 * p.a * std::pow(r, p.a + 1.0) - p.d;
  };
  double lo = 1.0;
  double hi = 1.0;
  while (lhs(lo) > 0.0) lo *= 0.5;
  while (lhs(hi) < 0.0) hi *= 2.0;
  while (hi / lo - 1.0 > 1e-15) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    (lhs(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace thermoflux
