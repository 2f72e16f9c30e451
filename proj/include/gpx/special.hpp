#pragma once

// Gaussian tail and small numerical helpers shared by the modules.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include <boost/math/quadrature/gauss.hpp>

namespace gpx {

/// Upper tail of the standard normal law, P(N(0,1) > u).
inline double gaussian_tail(double u) {
  return 0.5 * std::erfc(u / std::numbers::sqrt2);
}

namespace detail {

// Mills ratio Psi(u)/phi(u) by the Laplace continued fraction, u >= 5.
inline double mills_ratio_cf(double u) {
  // Backward evaluation of u + 1/(u + 2/(u + 3/(u + ...))).
  double tail = u;
  for (int k = 200; k >= 1; --k) tail = u + k / tail;
  return 1.0 / tail;
}

}  // namespace detail

/// log Psi(u), finite for every finite u (no underflow for large u).
inline double log_gaussian_tail(double u) {
  if (u < 5.0) return std::log(gaussian_tail(u));
  constexpr double log_sqrt_2pi = 0.91893853320467274178;
  return -0.5 * u * u - log_sqrt_2pi + std::log(detail::mills_ratio_cf(u));
}

/// Numerically stable log(sum(exp(x))).
inline double log_sum_exp(std::span<const double> x) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : x) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

/// Fixed-order Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

/// Integral over [0, T] on dyadic panels accumulating at 0; tolerates
/// integrable endpoint singularities and sharp decay near 0.
template <class F>
double integrate_toward_zero(F&& f, double T, int levels = 64) {
  if (!(T > 0.0)) return 0.0;
  double acc = 0.0;
  double hi = T;
  for (int k = 0; k < levels; ++k) {
    const double lo = 0.5 * hi;
    acc += gauss_legendre(f, lo, hi);
    hi = lo;
  }
  return acc + gauss_legendre(f, 0.0, hi);
}

}  // namespace gpx
