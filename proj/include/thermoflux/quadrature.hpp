#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature. The interval with the
// largest error estimate is bisected until the summed estimate falls below
// the requested tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <queue>
#include <sstream>
#include <vector>

#include "thermoflux/error.hpp"

namespace thermoflux {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  double abs_integral = 0.0;  // integral of |f|, the scale the relative tolerance refers to
  std::size_t intervals = 0;
};

namespace detail {

// Kronrod abscissae on [0, 1]; odd indices are the embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error, abs_value;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class Fn>
Segment gauss_kronrod_15(Fn& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(fc) * kKronrodWeights[7];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half), abs_sum * std::abs(half)};
}

}  // namespace detail

/// Integral of `f` over [lo, hi]. Converged when the error estimate is at most
/// max(abs_tol, rel_tol * integral of |f|). Throws NumericalError otherwise.
template <class Fn>
QuadratureResult integrate(Fn&& f, double lo, double hi, const QuadratureOptions& opt = {}) {
  if (lo == hi) return {};
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw NumericalError("integration bounds must be finite");
  }
  const double sign = hi > lo ? 1.0 : -1.0;
  if (sign < 0) std::swap(lo, hi);

  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gauss_kronrod_15(f, lo, hi));
  double value = heap.top().value;
  double error = heap.top().error;
  double abs_value = heap.top().abs_value;

  while (true) {
    if (!std::isfinite(value) || !std::isfinite(error)) {
      std::ostringstream msg;
      msg << "non-finite integrand on [" << lo << ", " << hi << "]";
      throw NumericalError(msg.str());
    }
    if (error <= std::max(opt.abs_tol, opt.rel_tol * abs_value)) break;
    if (heap.size() >= opt.max_intervals) {
      const auto& worst = heap.top();
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << lo << ", " << hi << "]: error estimate "
          << error << " after " << heap.size() << " intervals, worst interval [" << worst.lo
          << ", " << worst.hi << "] with error " << worst.error;
      throw NumericalError(msg.str());
    }
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const auto left = detail::gauss_kronrod_15(f, worst.lo, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    abs_value += left.abs_value + right.abs_value - worst.abs_value;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the leaves to drop the running-update drift.
  double v = 0.0, e = 0.0, av = 0.0;
  std::vector<detail::Segment> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::sort(leaves.begin(), leaves.end(),
            [](const detail::Segment& x, const detail::Segment& y) { return x.lo < y.lo; });
  for (const auto& s : leaves) {
    v += s.value;
    e += s.error;
    av += s.abs_value;
  }
  return {sign * v, e, av, leaves.size()};
}

}  // namespace thermoflux
