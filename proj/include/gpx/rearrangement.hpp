#pragma once

// Occupation measures F(x) = mes{t in side : f(t) <= x} of f = (1 - sigma^2)/2,
// their generalized inverses (the monotone rearrangements), Laplace
// transforms of dF and the truncated informative integrals.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gpx/errors.hpp"
#include "gpx/process_model.hpp"
#include "gpx/regvar.hpp"
#include "gpx/special.hpp"

namespace gpx {

struct OccupationCDF {
  Side side = Side::plus;
  double x_cut = 0.0;
  double length = 0.0;  // side length S, bound on F

  // closed form, used when set; F is evaluated on [0, x_cut]
  std::function<double(double)> closed;
  std::string descriptor;

  // table of (x, F) knots, x nondecreasing; a repeated x encodes a jump
  std::vector<double> x;
  std::vector<double> F;

  bool tabulated() const { return !closed; }

  double operator()(double v) const {
    if (v < 0.0) return 0.0;
    v = std::min(v, x_cut);
    if (closed) return std::clamp(closed(v), 0.0, length);
    auto it = std::upper_bound(x.begin(), x.end(), v);
    if (it == x.end()) return F.back();
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    if (i == 0) return 0.0;
    const double w = (v - x[i - 1]) / (x[i] - x[i - 1]);
    return F[i - 1] + w * (F[i] - F[i - 1]);
  }
};

/// Closed-form occupation CDF on [0, x_cut].
inline OccupationCDF closed_occupation(std::function<double(double)> F, double length, double x_cut,
                                       std::string descriptor, Side side = Side::plus) {
  OccupationCDF o;
  o.side = side;
  o.x_cut = x_cut;
  o.length = length;
  o.closed = std::move(F);
  o.descriptor = std::move(descriptor);
  return o;
}

/// Exact occupation CDF of the piecewise-linear interpolant of f sampled at
/// t_j = j * step. Flat cells contribute jumps; sloped cells spread their
/// length uniformly over [min, max] of their end values.
inline OccupationCDF occupation_from_samples(std::span<const double> f, double step, double x_cut,
                                             Side side = Side::plus) {
  if (f.size() < 2) throw SpecViolation("occupation_from_samples: need at least two samples");
  if (!(step > 0.0) || !(x_cut > 0.0)) throw SpecViolation("occupation_from_samples: step and x_cut must be positive");
  for (double v : f)
    if (!(v >= 0.0) || !std::isfinite(v)) throw SpecViolation("occupation_from_samples: f must be finite and >= 0");

  const std::size_t cells = f.size() - 1;
  std::vector<double> lo(cells), hi(cells);
  std::vector<std::size_t> sloped, flat;
  for (std::size_t j = 0; j < cells; ++j) {
    lo[j] = std::min(f[j], f[j + 1]);
    hi[j] = std::max(f[j], f[j + 1]);
    (hi[j] > lo[j] ? sloped : flat).push_back(j);
  }
  auto by_lo = [&](std::size_t a, std::size_t b) { return lo[a] < lo[b]; };
  std::vector<std::size_t> starts = sloped;
  std::sort(starts.begin(), starts.end(), by_lo);
  std::sort(flat.begin(), flat.end(), by_lo);

  std::vector<double> knots{0.0};
  for (std::size_t j = 0; j < cells; ++j) {
    if (lo[j] <= x_cut) knots.push_back(lo[j]);
    if (hi[j] <= x_cut) knots.push_back(hi[j]);
  }
  const double top = *std::max_element(hi.begin(), hi.end());
  knots.push_back(std::min(x_cut, top));
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  OccupationCDF o;
  o.side = side;
  o.x_cut = x_cut;
  o.length = step * static_cast<double>(cells);
  o.descriptor = "grid";
  o.x.reserve(2 * knots.size());
  o.F.reserve(2 * knots.size());

  std::vector<std::size_t> active;
  double done = 0.0;  // mass of cells entirely below the current knot
  std::size_t next_start = 0, next_flat = 0;
  o.x.push_back(0.0);
  o.F.push_back(0.0);
  for (double xk : knots) {
    while (next_start < starts.size() && lo[starts[next_start]] <= xk) active.push_back(starts[next_start++]);
    std::size_t keep = 0;
    for (std::size_t a : active) {
      if (hi[a] <= xk) done += step;
      else active[keep++] = a;
    }
    active.resize(keep);
    double partial = 0.0;
    for (std::size_t a : active) partial += step * (xk - lo[a]) / (hi[a] - lo[a]);
    double value = std::min(o.length, done + partial);
    if (xk > o.x.back()) {
      o.x.push_back(xk);
      o.F.push_back(std::max(value, o.F.back()));
    }
    double jump = 0.0;
    while (next_flat < flat.size() && lo[flat[next_flat]] <= xk) {
      jump += step;
      ++next_flat;
    }
    if (jump > 0.0) {
      done += jump;
      o.x.push_back(xk);
      o.F.push_back(std::min(o.length, std::max(done + partial, o.F.back())));
    }
  }
  return o;
}

namespace detail {

inline std::vector<double> side_samples(const ProcessSpec& spec, Side side, std::size_t grid_size) {
  std::vector<double> f(grid_size + 1);
  const double sign = side == Side::plus ? 1.0 : -1.0;
  for (std::size_t j = 0; j <= grid_size; ++j) {
    const double t = j == grid_size ? sign * spec.S : sign * spec.S * static_cast<double>(j) / grid_size;
    f[j] = 0.5 * (1.0 - eval_variance(spec, t));
  }
  return f;
}

// Whether the closed-form family is monotone in |t| on the side.
inline bool monotone_closed_form(const ProcessSpec& spec, Side side) {
  const auto& v = spec.variance;
  switch (v.form) {
    case VarianceForm::constant:
    case VarianceForm::power:
    case VarianceForm::exp_gentle: return true;
    case VarianceForm::power_log: {
      const auto& p = v.side(side);
      return p.log_power == 0.0 || spec.S <= std::exp(-p.log_power / p.exponent);
    }
    case VarianceForm::tabulated: return false;
  }
  return false;
}

// f on the side as a function of |t|.
inline std::function<double(double)> side_f(const ProcessSpec& spec, Side side) {
  const double sign = side == Side::plus ? 1.0 : -1.0;
  return [v = spec.variance, sign](double a) { return 0.5 * variance_deficit(v, sign * a); };
}

}  // namespace detail

/// F on one side of the maximum, truncated at x_cut.
inline OccupationCDF occupation_cdf(const ProcessSpec& spec, Side side, double x_cut, std::size_t grid_size = 1 << 14) {
  if (!(x_cut > 0.0)) throw SpecViolation("occupation_cdf: x_cut must be positive");
  if (grid_size < 256) throw SpecViolation("occupation_cdf: grid_size must be >= 256");
  const double S = spec.S;
  const auto& v = spec.variance;
  if (detail::monotone_closed_form(spec, side)) {
    const SideParams p = v.side(side);
    std::function<double(double)> F;
    std::string desc;
    switch (v.form) {
      case VarianceForm::constant:
        F = [S](double) { return S; };
        desc = "constant: F = S";
        break;
      case VarianceForm::power:
        F = [S, p](double x) { return std::min(S, std::pow(2.0 * x / p.coeff, 1.0 / p.exponent)); };
        desc = "power: F = (2x/C)^(1/beta)";
        break;
      case VarianceForm::exp_gentle: {
        const double fS = 0.5 * p.coeff * std::exp(-std::pow(S, -p.exponent));
        F = [S, p, fS](double x) {
          if (x >= fS) return S;
          if (x <= 0.0) return 0.0;
          return std::pow(std::log(p.coeff / (2.0 * x)), -1.0 / p.exponent);
        };
        desc = "exp_gentle: F = log^(-1/beta)(C/(2x))";
        break;
      }
      case VarianceForm::power_log: {
        auto f = detail::side_f(spec, side);
        const double fS = f(S);
        F = [S, f, fS](double x) {
          if (x >= fS) return S;
          if (x <= 0.0) return 0.0;
          return generalized_inverse(f, x, S * 1e-300, S, 512);
        };
        desc = "power_log: F = f^<- (bisection)";
        break;
      }
      case VarianceForm::tabulated: break;
    }
    return closed_occupation(std::move(F), S, x_cut, std::move(desc), side);
  }
  if (v.form == VarianceForm::power_log) {
    // f rises up to t_peak and falls after it; below min(f(S), f(t_peak)) only
    // the rising branch is occupied
    const SideParams p = v.side(side);
    const double peak = std::exp(-p.log_power / p.exponent);
    auto f = detail::side_f(spec, side);
    if (x_cut < f(S)) {
      auto F = [f, peak](double x) { return x <= 0.0 ? 0.0 : generalized_inverse(f, x, peak * 1e-300, peak, 512); };
      return closed_occupation(F, S, x_cut, "power_log: F = f^<- on the rising branch", side);
    }
  }
  const auto f = detail::side_samples(spec, side, grid_size);
  for (std::size_t j = 1; j < f.size(); ++j) {
    if (!(f[j] > 0.0))
      throw SpecViolation("occupation_cdf: f nonpositive off zero (sigma^2 = 1 away from the maximum)");
    if (f[j] == f[j - 1]) throw SpecViolation("occupation_cdf: variance plateau off zero");
  }
  return occupation_from_samples(f, S / static_cast<double>(grid_size), x_cut, side);
}

struct LaplaceValue {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the mass beyond x_cut times exp(-lambda x_cut)
};

/// Integral of exp(-lambda x) dF(x) over [0, x_cut], including an atom at 0.
inline LaplaceValue laplace_transform(const OccupationCDF& F, double lambda) {
  if (!(lambda > 0.0)) throw SpecViolation("laplace_transform: lambda must be positive");
  LaplaceValue r;
  const double xc = F.tabulated() ? std::min(F.x_cut, F.x.back()) : F.x_cut;
  r.tail_bound = std::exp(-lambda * F.x_cut) * std::max(0.0, F.length - F(F.x_cut));
  if (F.tabulated()) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < F.x.size(); ++i) {
      const double dF = F.F[i + 1] - F.F[i];
      if (dF == 0.0) continue;
      const double dx = F.x[i + 1] - F.x[i];
      const double e0 = std::exp(-lambda * F.x[i]);
      const double z = lambda * dx;
      acc += dF * e0 * (z > 1e-12 ? -std::expm1(-z) / z : 1.0 - 0.5 * z);
    }
    r.value = acc;
    return r;
  }
  // Integration by parts: e^{-lambda xc} F(xc) + int_0^{lambda xc} e^{-y} F(y / lambda) dy.
  const double Y = lambda * xc;
  const double upper = std::min(Y, 800.0);
  auto g = [&](double y) { return std::exp(-y) * F(y / lambda); };
  double acc = 0.0;
  double a = 0.0;
  double b = std::min(upper, 1e-12);
  while (true) {
    acc += gauss_legendre(g, a, b);
    if (b >= upper) break;
    a = b;
    b = std::min(upper, 2.0 * b);
  }
  r.value = std::exp(-Y) * F(xc) + acc;
  return r;
}

/// Rearrangement f_+ = F^<- as a piecewise-linear table on [0, F(x_cut)].
/// Flat stretches of F become jumps of f_+ and vice versa.
struct Rearrangement {
  std::vector<double> t;
  std::vector<double> value;
};

inline Rearrangement monotone_rearrangement(const OccupationCDF& F) {
  if (!F.tabulated()) throw SpecViolation("monotone_rearrangement: requires a tabulated occupation CDF");
  return {F.F, F.x};
}

struct InformativeIntegral {
  double value = 0.0;
  double threshold = 0.0;  // 2 u^-2 log^A u
  double extent = 0.0;     // measure of the integration domain
  bool empty_domain = false;
};

/// Integral of exp(-u^2 f(t)) over {t in side : f(t) <= 2 u^-2 log^A u}.
inline InformativeIntegral informative_integral(const ProcessSpec& spec, Side side, double u, double A = 4.0,
                                                std::size_t grid_size = 1 << 14) {
  if (!(u >= 2.0)) throw SpecViolation("informative_integral: requires u >= 2");
  if (!(A > 1.0)) throw SpecViolation("informative_integral: requires A > 1");
  InformativeIntegral r;
  const double lambda = u * u;
  r.threshold = 2.0 * std::pow(std::log(u), A) / lambda;
  const auto f = detail::side_f(spec, side);
  auto integrand = [&](double a) { return std::exp(-lambda * f(a)); };
  if (!(r.threshold > 0.0)) {
    r.empty_domain = true;
    return r;
  }
  if (detail::monotone_closed_form(spec, side)) {
    const OccupationCDF F = occupation_cdf(spec, side, r.threshold, 256);
    r.extent = F(r.threshold);
    if (!(r.extent > 0.0)) {
      r.empty_domain = true;
      return r;
    }
    r.value = integrate_toward_zero(integrand, r.extent);
    return r;
  }
  const double h = spec.S / static_cast<double>(grid_size);
  double acc = 0.0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double a = h * j, b = j + 1 == grid_size ? spec.S : h * (j + 1);
    const bool ia = f(a) <= r.threshold, ib = f(b) <= r.threshold;
    if (!ia && !ib) continue;
    double lo = a, hi = b;
    if (ia != ib) {
      double in = ia ? a : b, out = ia ? b : a;
      for (int it = 0; it < 200 && std::abs(out - in) > 1e-15 * std::max(1.0, std::abs(in)); ++it) {
        const double m = 0.5 * (in + out);
        (f(m) <= r.threshold ? in : out) = m;
      }
      (ia ? hi : lo) = in;
    }
    r.extent += hi - lo;
    acc += j == 0 ? integrate_toward_zero(integrand, hi) : gauss_legendre(integrand, lo, hi);
  }
  r.value = acc;
  r.empty_domain = !(r.extent > 0.0);
  return r;
}

}  // namespace gpx
