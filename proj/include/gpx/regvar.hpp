#pragma once

// Regular-variation utilities: left-continuous generalized inverse, the
// scaling function q(u) = (1 - rho)^<-(u^-2), the de Bruijn conjugate and a
// log-log index probe.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gpx/errors.hpp"
#include "gpx/process_model.hpp"

namespace gpx {

struct RVFunction {
  std::string name;
  std::function<double(double)> g;
  double x_max = 1.0;
  double index = 0.0;
  std::string slowly_varying = "unknown";

  double operator()(double x) const { return g(x); }
};

namespace detail {

inline double bisect_crossing(const std::function<double(double)>& g, double y, double a, double b) {
  // Invariant: g(a) < y <= g(b).
  for (int it = 0; it < 400; ++it) {
    if (b - a <= 1e-13 * std::abs(b)) break;
    const double m = (a > 0.0 && b / a > 4.0) ? std::sqrt(a * b) : 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (g(m) >= y) b = m;
    else a = m;
  }
  return b;
}

}  // namespace detail

/// inf{x in [lo, hi] : g(x) >= y}. The bracket is scanned (geometric spacing
/// when lo > 0 and hi/lo is large) so the first crossing of the running
/// maximum is located before bisecting.
inline double generalized_inverse(const std::function<double(double)>& g, double y, double lo, double hi,
                                  std::size_t scan_points = 2048) {
  if (!(y > 0.0) || !std::isfinite(y)) throw SpecViolation("generalized_inverse: y must be positive and finite");
  if (!(hi > lo)) throw SpecViolation("generalized_inverse: empty bracket");
  if (g(lo) >= y) throw BracketError("generalized_inverse: g(lo) already exceeds y = " + std::to_string(y));
  const bool geometric = lo > 0.0 && hi / lo > 1e3;
  double prev = lo;
  for (std::size_t i = 1; i <= scan_points; ++i) {
    const double s = static_cast<double>(i) / scan_points;
    const double x = i == scan_points ? hi : (geometric ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s);
    if (g(x) >= y) return detail::bisect_crossing(g, y, prev, x);
    prev = x;
  }
  throw BracketError("generalized_inverse: y = " + std::to_string(y) + " not attained on the bracket");
}

inline double generalized_inverse(const RVFunction& g, double y, double lo, double hi) {
  return generalized_inverse(g.g, y, lo, hi);
}

/// Scaling function q(u): the generalized inverse of 1 - rho at u^-2.
inline double q_of_u(const CorrelationProfile& c, double u) {
  if (!(u >= 2.0)) throw SpecViolation("q_of_u: requires u >= 2");
  const double y = 1.0 / (u * u);
  switch (c.form) {
    case CorrelationForm::fbm_type: return std::pow(y / c.coeff, 1.0 / c.alpha);
    case CorrelationForm::power_exp: return std::pow(-std::log1p(-y) / c.coeff, 1.0 / c.alpha);
    case CorrelationForm::power_log_corrected: {
      const double hi = std::min(1.0, c.log_corrected_peak());
      auto g = [&c](double t) { return correlation_deficit(c, t); };
      return generalized_inverse(g, y, hi * 1e-300, hi);
    }
    case CorrelationForm::tabulated: {
      const double hi = c.table.back();
      auto g = [&c](double t) { return correlation_deficit(c, t); };
      return generalized_inverse(g, y, hi * 1e-300, hi);
    }
  }
  return 0.0;
}

/// Slowly varying part l(t) = (1 - rho(t)) / t^alpha of a correlation profile.
inline RVFunction correlation_slowly_varying(const CorrelationProfile& c) {
  RVFunction f;
  f.name = std::string("l[") + to_string(c.form) + "]";
  f.index = 0.0;
  f.x_max = c.form == CorrelationForm::tabulated ? c.table.back() : std::min(1.0, c.log_corrected_peak());
  f.g = [c](double t) { return correlation_deficit(c, t) / std::pow(t, c.alpha); };
  return f;
}

enum class ConjugateRoute { automatic, reciprocal, implicit };

struct ConjugateResult {
  double value = 0.0;
  ConjugateRoute route = ConjugateRoute::automatic;
  double self_neglect_ratio = 0.0;  // l(x l(x)) / l(x)
};

/// de Bruijn conjugate l#(x). The reciprocal route 1/l(x) is used when the
/// self-neglecting check passes; the implicit route solves t^alpha l(t) = x
/// and returns t^alpha / x, so that (q u^{2/alpha})^alpha = l#(u^-2).
inline ConjugateResult debruijn_conjugate_detail(const RVFunction& ell, double x, double alpha = 1.0,
                                                 ConjugateRoute route = ConjugateRoute::automatic,
                                                 double tol = 1e-2) {
  if (!(x > 0.0 && x < 1.0)) throw SpecViolation("debruijn_conjugate: x must lie in (0, 1)");
  ConjugateResult r;
  const double lx = ell(x);
  const double probe = x * lx;
  r.self_neglect_ratio = (probe > 0.0 && probe <= ell.x_max) ? ell(probe) / lx
                                                              : std::numeric_limits<double>::quiet_NaN();
  bool reciprocal = route == ConjugateRoute::reciprocal;
  if (route == ConjugateRoute::automatic)
    reciprocal = std::isfinite(r.self_neglect_ratio) && std::abs(r.self_neglect_ratio - 1.0) <= tol;
  if (reciprocal) {
    r.value = 1.0 / lx;
    r.route = ConjugateRoute::reciprocal;
    return r;
  }
  auto g = [&](double t) { return std::pow(t, alpha) * ell(t); };
  const double t = generalized_inverse(g, x, ell.x_max * 1e-300, ell.x_max);
  r.value = std::pow(t, alpha) / x;
  r.route = ConjugateRoute::implicit;
  return r;
}

inline double debruijn_conjugate(const RVFunction& ell, double x, double alpha = 1.0,
                                 ConjugateRoute route = ConjugateRoute::automatic) {
  return debruijn_conjugate_detail(ell, x, alpha, route).value;
}

enum class RVFlag { regular, slowly_varying_contaminated, not_regularly_varying };

inline const char* to_string(RVFlag f) {
  switch (f) {
    case RVFlag::regular: return "regular";
    case RVFlag::slowly_varying_contaminated: return "slowly_varying_contaminated";
    case RVFlag::not_regularly_varying: return "not_regularly_varying";
  }
  return "?";
}

struct RVIndexEstimate {
  double index = 0.0;                // least-squares slope of log g on log x
  std::vector<double> local_slopes;  // between consecutive scales
  double drift = 0.0;                // relative spread of the local slopes
  RVFlag flag = RVFlag::regular;
};

/// Log-log regression diagnostic for the RV index of g at zero.
inline RVIndexEstimate rv_index_probe(const std::function<double(double)>& g, const std::vector<double>& scales) {
  if (scales.size() < 4) throw SpecViolation("rv_index_probe: need at least 4 scales");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] < scales[i - 1] && scales[i] > 0.0))
      throw SpecViolation("rv_index_probe: scales must descend toward 0");
  std::vector<double> lx, lg;
  for (double x : scales) {
    const double v = g(x);
    if (!(v > 0.0)) throw SpecViolation("rv_index_probe: domain error, g(" + std::to_string(x) + ") <= 0");
    lx.push_back(std::log(x));
    lg.push_back(std::log(v));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / n, my += lg[i] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (lg[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  RVIndexEstimate est;
  est.index = sxy / sxx;
  for (std::size_t i = 1; i < lx.size(); ++i) est.local_slopes.push_back((lg[i] - lg[i - 1]) / (lx[i] - lx[i - 1]));
  const auto [mn, mxs] = std::minmax_element(est.local_slopes.begin(), est.local_slopes.end());
  est.drift = (*mxs - *mn) / std::max(std::abs(est.index), 1e-300);
  if (est.drift <= 1e-6) est.flag = RVFlag::regular;
  else if (est.drift <= 1.0) est.flag = RVFlag::slowly_varying_contaminated;
  else est.flag = RVFlag::not_regularly_varying;
  return est;
}

inline RVIndexEstimate rv_index_probe(const RVFunction& g, const std::vector<double>& scales) {
  return rv_index_probe(g.g, scales);
}

}  // namespace gpx
