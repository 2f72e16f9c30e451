#pragma once

// Process specification: variance profile sigma^2(t) with a unique maximum at
// t = 0, stationary local correlation rho(t), and the separable covariance
// r(s,t) = sigma(s) sigma(t) rho(t - s) built from them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gpx/errors.hpp"

namespace gpx {

enum class Side { plus, minus };

inline const char* to_string(Side s) { return s == Side::plus ? "plus" : "minus"; }

// Simulated / evaluated part of [-S, S]: both sides, [0, S] or [-S, 0].
enum class Domain { both, plus, minus };

inline const char* to_string(Domain d) {
  switch (d) {
    case Domain::both: return "both";
    case Domain::plus: return "plus";
    case Domain::minus: return "minus";
  }
  return "?";
}

/// Piecewise-linear table with strictly increasing abscissae. Evaluation
/// outside [x.front(), x.back()] is a RangeError.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() < 2 || x_.size() != y_.size())
      throw SpecViolation("table: need at least two (x, y) pairs of equal length");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw SpecViolation("table: abscissae must be strictly increasing");
    for (double v : y_)
      if (!std::isfinite(v)) throw SpecViolation("table: non-finite value");
    for (double v : y_) c_.push_back(1.0 - v);
  }

  bool empty() const { return x_.empty(); }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

  double operator()(double x) const { return interpolate(x, y_); }

  /// 1 - value, interpolated from 1 - y so values near 1 keep their precision.
  double complement(double x) const { return interpolate(x, c_); }

 private:
  double interpolate(double x, const std::vector<double>& y) const {
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(x_.front()), std::abs(x_.back())));
    if (x < x_.front() - slack || x > x_.back() + slack)
      throw RangeError("table: evaluation at " + std::to_string(x) + " outside [" +
                       std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
    x = std::clamp(x, x_.front(), x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.end()) ? x_.size() - 1 : static_cast<std::size_t>(it - x_.begin());
    if (i == 0) i = 1;
    const double w = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> c_;
};

// ---------------------------------------------------------------------------
// Variance

enum class VarianceForm {
  constant,    // sigma^2 == 1 (stationary process)
  power,       // 1 - sigma^2(t) = C |t|^beta
  power_log,   // 1 - sigma^2(t) = C |t|^beta log^k(1/|t|)
  exp_gentle,  // 1 - sigma^2(t) = C exp(-|t|^-beta)
  tabulated,   // (t, sigma^2(t)) samples, linear interpolation
};

/// Per-side parameters of the closed-form variance families.
struct SideParams {
  double coeff = 1.0;
  double exponent = 1.0;
  double log_power = 0.0;  // only used by power_log
};

struct VarianceProfile {
  VarianceForm form = VarianceForm::constant;
  SideParams plus{};
  SideParams minus{};
  PiecewiseLinear table{};  // t -> sigma^2(t), tabulated form only

  const SideParams& side(Side s) const { return s == Side::plus ? plus : minus; }

  static VarianceProfile constant() { return {}; }
  static VarianceProfile power(SideParams p, SideParams m) { return {VarianceForm::power, p, m, {}}; }
  static VarianceProfile power(double coeff, double beta) { return power({coeff, beta, 0.0}, {coeff, beta, 0.0}); }
  static VarianceProfile power_log(SideParams p, SideParams m) { return {VarianceForm::power_log, p, m, {}}; }
  static VarianceProfile power_log(double coeff, double beta, double log_power = 1.0) {
    return power_log({coeff, beta, log_power}, {coeff, beta, log_power});
  }
  static VarianceProfile exp_gentle(SideParams p, SideParams m) { return {VarianceForm::exp_gentle, p, m, {}}; }
  static VarianceProfile exp_gentle(double coeff, double beta) {
    return exp_gentle({coeff, beta, 0.0}, {coeff, beta, 0.0});
  }
  static VarianceProfile tabulated(std::vector<double> t, std::vector<double> sigma2) {
    VarianceProfile v;
    v.form = VarianceForm::tabulated;
    v.table = PiecewiseLinear(std::move(t), std::move(sigma2));
    return v;
  }
};

inline const char* to_string(VarianceForm f) {
  switch (f) {
    case VarianceForm::constant: return "constant";
    case VarianceForm::power: return "power";
    case VarianceForm::power_log: return "power_log";
    case VarianceForm::exp_gentle: return "exp_gentle";
    case VarianceForm::tabulated: return "tabulated";
  }
  return "?";
}

/// 1 - sigma^2(t) for the closed-form families (no domain check).
inline double variance_deficit(const VarianceProfile& v, double t) {
  if (v.form == VarianceForm::tabulated) return v.table.complement(t);
  if (v.form == VarianceForm::constant || t == 0.0) return 0.0;
  const SideParams& p = v.side(t > 0.0 ? Side::plus : Side::minus);
  const double a = std::abs(t);
  switch (v.form) {
    case VarianceForm::power: return p.coeff * std::pow(a, p.exponent);
    case VarianceForm::power_log: return p.coeff * std::pow(a, p.exponent) * std::pow(std::log(1.0 / a), p.log_power);
    case VarianceForm::exp_gentle: return p.coeff * std::exp(-std::pow(a, -p.exponent));
    default: return 0.0;
  }
}

// ---------------------------------------------------------------------------
// Correlation

enum class CorrelationForm {
  power_exp,            // rho(t) = exp(-C |t|^alpha)
  fbm_type,             // rho(t) = max(0, 1 - C |t|^alpha)
  power_log_corrected,  // 1 - rho(t) = C |t|^alpha log^k(1/|t|) near zero
  tabulated,            // (lag, rho) samples, lag >= 0
};

inline const char* to_string(CorrelationForm f) {
  switch (f) {
    case CorrelationForm::power_exp: return "power_exp";
    case CorrelationForm::fbm_type: return "fbm_type";
    case CorrelationForm::power_log_corrected: return "power_log_corrected";
    case CorrelationForm::tabulated: return "tabulated";
  }
  return "?";
}

struct CorrelationProfile {
  CorrelationForm form = CorrelationForm::power_exp;
  double coeff = 1.0;
  double alpha = 1.0;
  double log_power = 0.0;   // power_log_corrected only
  PiecewiseLinear table{};  // lag -> rho, tabulated only

  static CorrelationProfile power_exp(double coeff, double alpha) {
    return {CorrelationForm::power_exp, coeff, alpha, 0.0, {}};
  }
  static CorrelationProfile fbm_type(double coeff, double alpha) {
    return {CorrelationForm::fbm_type, coeff, alpha, 0.0, {}};
  }
  static CorrelationProfile power_log_corrected(double coeff, double alpha, double log_power) {
    return {CorrelationForm::power_log_corrected, coeff, alpha, log_power, {}};
  }
  static CorrelationProfile tabulated(std::vector<double> lag, std::vector<double> rho, double alpha) {
    CorrelationProfile c;
    c.form = CorrelationForm::tabulated;
    c.alpha = alpha;
    c.table = PiecewiseLinear(std::move(lag), std::move(rho));
    return c;
  }

  /// Lag beyond which 1 - C t^alpha log^k(1/t) stops increasing.
  double log_corrected_peak() const {
    return log_power > 0.0 ? std::exp(-log_power / alpha) : std::numeric_limits<double>::infinity();
  }
};

/// 1 - rho(lag). Closed forms are defined for every lag; tables throw beyond range.
inline double correlation_deficit(const CorrelationProfile& c, double lag) {
  const double a = std::abs(lag);
  if (a == 0.0) return 0.0;
  switch (c.form) {
    case CorrelationForm::power_exp: return -std::expm1(-c.coeff * std::pow(a, c.alpha));
    case CorrelationForm::fbm_type: return std::min(1.0, c.coeff * std::pow(a, c.alpha));
    case CorrelationForm::power_log_corrected: {
      const double x = std::min(a, c.log_corrected_peak());
      const double g = c.coeff * std::pow(x, c.alpha) * std::pow(std::log(1.0 / x), c.log_power);
      return std::min(2.0, g);
    }
    case CorrelationForm::tabulated: return c.table.complement(a);
  }
  return 0.0;
}

inline double correlation_value(const CorrelationProfile& c, double lag) { return 1.0 - correlation_deficit(c, lag); }

// ---------------------------------------------------------------------------
// Process specification

struct ProcessSpec {
  std::string name;
  double S = 1.0;  // domain [-S, S]
  VarianceProfile variance{};
  CorrelationProfile correlation{};

  bool stationary() const { return variance.form == VarianceForm::constant; }
  double alpha() const { return correlation.alpha; }
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw SpecViolation(what);
}

inline void validate_side(const SideParams& p, VarianceForm form, double S, const char* side) {
  const std::string tag = std::string("variance.") + side;
  require(std::isfinite(p.coeff) && p.coeff > 0.0, tag + ".C must be positive");
  require(std::isfinite(p.exponent) && p.exponent > 0.0, tag + ".beta must be positive");
  if (form == VarianceForm::power_log) {
    require(p.log_power >= 0.0, tag + ".k must be nonnegative");
    require(S < 1.0, "variance power_log requires S < 1 (log(1/|t|) > 0 off zero)");
  }
}

}  // namespace detail

/// Checks parameter ranges and that sigma^2 has its unique maximum 1 at t = 0
/// with sigma^2 in [0, 1] on [-S, S]. Throws SpecViolation otherwise.
inline void validate(const ProcessSpec& spec) {
  using detail::require;
  require(std::isfinite(spec.S) && spec.S > 0.0, "S must be positive");
  const auto& c = spec.correlation;
  require(c.alpha > 0.0 && c.alpha <= 2.0, "correlation.alpha must lie in (0, 2]");
  if (c.form != CorrelationForm::tabulated) require(c.coeff > 0.0, "correlation.C must be positive");
  if (c.form == CorrelationForm::power_log_corrected) require(c.log_power >= 0.0, "correlation.k must be >= 0");
  if (c.form == CorrelationForm::tabulated) {
    require(c.table.front() == 0.0, "correlation table must start at lag 0");
    require(std::abs(c.table(0.0) - 1.0) < 1e-12, "correlation table must have rho(0) = 1");
    require(c.table.back() >= 2.0 * spec.S * (1.0 - 1e-12), "correlation table must cover lags [0, 2S]");
  }

  const auto& v = spec.variance;
  switch (v.form) {
    case VarianceForm::constant: break;
    case VarianceForm::power:
    case VarianceForm::power_log:
    case VarianceForm::exp_gentle:
      detail::validate_side(v.plus, v.form, spec.S, "plus");
      detail::validate_side(v.minus, v.form, spec.S, "minus");
      break;
    case VarianceForm::tabulated:
      require(v.table.front() <= -spec.S * (1.0 - 1e-12) && v.table.back() >= spec.S * (1.0 - 1e-12),
              "variance table must cover [-S, S]");
      require(std::abs(v.table(0.0) - 1.0) < 1e-12, "variance table must have sigma^2(0) = 1");
      break;
  }
  if (v.form == VarianceForm::constant) return;

  // Unique maximum and range on a probe grid; closed forms are monotone in |t|
  // on the admissible parameter set, so the endpoints decide the range.
  constexpr int probes = 1024;
  for (int i = 1; i <= probes; ++i) {
    for (double sign : {-1.0, 1.0}) {
      const double t = sign * spec.S * i / probes;
      const double d = variance_deficit(v, t);
      // closed forms are positive analytically; large exponents underflow near zero
      require(std::isfinite(d) && (d > 0.0 || v.form != VarianceForm::tabulated),
              "variance must satisfy sigma^2(t) < 1 for t != 0 (fails at t = " + std::to_string(t) + ")");
      require(d <= 1.0 + 1e-12, "variance must satisfy sigma^2(t) >= 0 (fails at t = " + std::to_string(t) + ")");
    }
  }
}

inline ProcessSpec make_process_spec(std::string name, double S, VarianceProfile variance,
                                     CorrelationProfile correlation) {
  ProcessSpec spec{std::move(name), S, std::move(variance), std::move(correlation)};
  validate(spec);
  return spec;
}

/// sigma^2(t) on [-S, S].
inline double eval_variance(const ProcessSpec& spec, double t) {
  if (!(std::abs(t) <= spec.S * (1.0 + 1e-12)))
    throw RangeError("eval_variance: t = " + std::to_string(t) + " outside [-S, S]");
  if (t == 0.0) return 1.0;
  return std::clamp(1.0 - variance_deficit(spec.variance, t), 0.0, 1.0);
}

/// rho(lag) for |lag| <= 2S.
inline double eval_correlation(const ProcessSpec& spec, double lag) {
  if (!(std::abs(lag) <= 2.0 * spec.S * (1.0 + 1e-12)))
    throw RangeError("eval_correlation: lag = " + std::to_string(lag) + " outside [-2S, 2S]");
  return correlation_value(spec.correlation, lag);
}

/// Separable covariance sigma(s) sigma(t) rho(t - s).
inline double eval_covariance(const ProcessSpec& spec, double s, double t) {
  return std::sqrt(eval_variance(spec, s) * eval_variance(spec, t)) * eval_correlation(spec, t - s);
}

/// f(t) = (1 - sigma^2(t)) / 2.
inline double half_deficit(const ProcessSpec& spec, double t) { return 0.5 * (1.0 - eval_variance(spec, t)); }

}  // namespace gpx
