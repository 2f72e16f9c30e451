#pragma once

// Side-wise limit h1(t) = lim u^2 (1 - sigma^2(q(u) t)), the S/T/P
// classification of each side and the informative interval B_u.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gpx/errors.hpp"
#include "gpx/process_model.hpp"
#include "gpx/regvar.hpp"

namespace gpx {

enum class SideCase { S, T, P };

inline const char* to_string(SideCase c) {
  switch (c) {
    case SideCase::S: return "S";
    case SideCase::T: return "T";
    case SideCase::P: return "P";
  }
  return "?";
}

struct H1Limit {
  double value = 0.0;  // 0, finite, or +inf
  bool symbolic = false;
  std::vector<double> u_schedule;
  std::vector<double> sequence;
  std::string diagnostic;
};

struct CaseLabel {
  SideCase left = SideCase::S;
  SideCase right = SideCase::S;
  std::optional<double> b_minus;
  std::optional<double> b_plus;

  SideCase side(Side s) const { return s == Side::plus ? right : left; }
  std::optional<double> b(Side s) const { return s == Side::plus ? b_plus : b_minus; }
  std::string combined() const { return std::string(to_string(left)) + "-" + to_string(right); }
};

namespace detail {

// Leading behaviour C t^a log^k(1/t) of a deficit near zero.
struct PowerLogLead {
  double coeff = 1.0;
  double index = 1.0;
  double log_power = 0.0;
  bool vanishing = false;  // faster than any power (exp_gentle) or identically zero
};

inline std::optional<PowerLogLead> variance_lead(const VarianceProfile& v, Side side) {
  const SideParams& p = v.side(side);
  switch (v.form) {
    case VarianceForm::constant:
    case VarianceForm::exp_gentle: return PowerLogLead{0.0, 0.0, 0.0, true};
    case VarianceForm::power: return PowerLogLead{p.coeff, p.exponent, 0.0, false};
    case VarianceForm::power_log: return PowerLogLead{p.coeff, p.exponent, p.log_power, false};
    case VarianceForm::tabulated: return std::nullopt;
  }
  return std::nullopt;
}

inline std::optional<PowerLogLead> correlation_lead(const CorrelationProfile& c) {
  switch (c.form) {
    case CorrelationForm::power_exp:
    case CorrelationForm::fbm_type: return PowerLogLead{c.coeff, c.alpha, 0.0, false};
    case CorrelationForm::power_log_corrected: return PowerLogLead{c.coeff, c.alpha, c.log_power, false};
    case CorrelationForm::tabulated: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

/// h1(t_ref) on one side; closed forms are decided symbolically, tabulated
/// profiles through the sequence u^2 (1 - sigma^2(q(u) t_ref)), u = 1e2..1e5.
inline H1Limit h1_limit(const ProcessSpec& spec, Side side, double t_ref) {
  if (t_ref == 0.0 || (side == Side::plus) != (t_ref > 0.0))
    throw SpecViolation("h1_limit: t_ref must be nonzero with the sign of the side");
  H1Limit r;
  const auto vl = detail::variance_lead(spec.variance, side);
  const auto cl = detail::correlation_lead(spec.correlation);
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (vl && cl) {
    r.symbolic = true;
    if (vl->vanishing) {
      r.value = 0.0;
      r.diagnostic = "variance deficit vanishes faster than any power";
    } else if (vl->index != cl->index) {
      r.value = vl->index > cl->index ? 0.0 : inf;
      r.diagnostic = "beta " + std::string(vl->index > cl->index ? ">" : "<") + " alpha";
    } else if (vl->log_power != cl->log_power) {
      r.value = vl->log_power < cl->log_power ? 0.0 : inf;
      r.diagnostic = "beta = alpha; logarithmic factors decide";
    } else {
      r.value = vl->coeff / cl->coeff * std::pow(std::abs(t_ref), cl->index);
      r.diagnostic = "beta = alpha; finite ratio of coefficients";
    }
    return r;
  }
  for (double u : {1e2, 1e3, 1e4, 1e5}) {
    const double t = q_of_u(spec.correlation, u) * t_ref;
    if (std::abs(t) > spec.S) continue;
    r.u_schedule.push_back(u);
    r.sequence.push_back(u * u * variance_deficit(spec.variance, t));
  }
  if (r.sequence.size() < 2) throw IndeterminateClassification("h1_limit: too few resolvable levels u");
  const auto [mn, mx] = std::minmax_element(r.sequence.begin(), r.sequence.end());
  double mean = 0.0;
  for (double v : r.sequence) mean += v / static_cast<double>(r.sequence.size());
  if (*mx < 1e-3) {
    r.value = 0.0;
    r.diagnostic = "sequence below 1e-3";
  } else if (*mn > 1e3) {
    r.value = inf;
    r.diagnostic = "sequence above 1e3";
  } else if ((*mx - *mn) / mean < 0.05) {
    r.value = r.sequence.back();
    r.diagnostic = "relative spread below 5%";
  } else {
    throw IndeterminateClassification("h1_limit: sequence does not settle (spread " +
                                      std::to_string((*mx - *mn) / mean) + ")");
  }
  return r;
}

inline SideCase side_case(double h1) {
  if (h1 == 0.0) return SideCase::S;
  if (std::isinf(h1)) return SideCase::T;
  return SideCase::P;
}

inline CaseLabel classify(const ProcessSpec& spec) {
  CaseLabel label;
  const H1Limit right = h1_limit(spec, Side::plus, 1.0);
  const H1Limit left = h1_limit(spec, Side::minus, -1.0);
  label.right = side_case(right.value);
  label.left = side_case(left.value);
  if (label.right == SideCase::P) label.b_plus = right.value;
  if (label.left == SideCase::P) label.b_minus = left.value;
  return label;
}

struct InformativeInterval {
  double T_minus = 0.0;
  double T_plus = 0.0;
  double A = 4.0;
  double u = 0.0;
  double threshold = 0.0;  // u^-2 log^A u
  bool clamped_minus = false;
  bool clamped_plus = false;
};

namespace detail {

// sup of {a in [0, S] : deficit <= tau} under the monotone envelope.
inline double informative_endpoint(const ProcessSpec& spec, Side side, double tau, bool& clamped) {
  const double S = spec.S;
  const auto& v = spec.variance;
  const SideParams& p = v.side(side);
  const double sign = side == Side::plus ? 1.0 : -1.0;
  clamped = false;
  double a = S;
  switch (v.form) {
    case VarianceForm::constant: clamped = true; return S;
    case VarianceForm::power: a = std::pow(tau / p.coeff, 1.0 / p.exponent); break;
    case VarianceForm::exp_gentle:
      a = tau < p.coeff ? std::pow(std::log(p.coeff / tau), -1.0 / p.exponent) : S;
      if (tau >= p.coeff) clamped = true;
      break;
    default: {
      auto g = [&](double x) { return variance_deficit(v, sign * x); };
      try {
        a = generalized_inverse(g, tau, S * 1e-300, S);
      } catch (const BracketError&) {
        clamped = true;
        return S;
      }
    }
  }
  if (a >= S) {
    clamped = true;
    return S;
  }
  return a;
}

}  // namespace detail

inline InformativeInterval informative_interval(const ProcessSpec& spec, double u, double A = 4.0) {
  if (!(u >= 2.0)) throw SpecViolation("informative_interval: requires u >= 2");
  if (!(A > 1.0)) throw SpecViolation("informative_interval: requires A > 1");
  InformativeInterval r;
  r.u = u;
  r.A = A;
  r.threshold = std::pow(std::log(u), A) / (u * u);
  r.T_plus = detail::informative_endpoint(spec, Side::plus, r.threshold, r.clamped_plus);
  r.T_minus = -detail::informative_endpoint(spec, Side::minus, r.threshold, r.clamped_minus);
  return r;
}

}  // namespace gpx
