#pragma once

// Asymptotic formulas for P(max X > u): stationary, stationary-like sides via
// Laplace transforms of the occupation measures, the regular-variation closed
// form, Talagrand and transition cases, and the case dispatch.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpx/classifier.hpp"
#include "gpx/errors.hpp"
#include "gpx/pickands.hpp"
#include "gpx/process_model.hpp"
#include "gpx/rearrangement.hpp"
#include "gpx/regvar.hpp"
#include "gpx/special.hpp"

namespace gpx {

enum class FormulaId { stationary, ss, s_one_side, tt, pp, p_one_side };

inline const char* to_string(FormulaId f) {
  switch (f) {
    case FormulaId::stationary: return "stationary";
    case FormulaId::ss: return "SS";
    case FormulaId::s_one_side: return "S-one-side";
    case FormulaId::tt: return "TT";
    case FormulaId::pp: return "PP";
    case FormulaId::p_one_side: return "P-one-side";
  }
  return "?";
}

struct Ingredient {
  double value = 0.0;
  Provenance provenance = Provenance::closed_form;
};

struct AsymptoticResult {
  FormulaId formula = FormulaId::stationary;
  std::string case_label;  // e.g. "S-T"; empty for direct formula calls
  Domain domain = Domain::both;
  double u = 0.0;
  double value = 0.0;
  double log_value = 0.0;  // finite even when value underflows
  std::map<std::string, Ingredient> ingredients;
  std::vector<std::string> notes;
};

struct AsymptoticOptions {
  double A = 4.0;                   // truncation exponent of x_cut = 2 u^-2 log^A u
  std::size_t grid_size = 1 << 14;  // occupation grid for non-monotone profiles
};

namespace detail {

inline Provenance q_provenance(const CorrelationProfile& c) {
  return (c.form == CorrelationForm::power_exp || c.form == CorrelationForm::fbm_type) ? Provenance::closed_form
                                                                                       : Provenance::numeric;
}

inline void require_H(const PickandsEstimate& H, double alpha) {
  if (H.kind != ConstantKind::H_alpha)
    throw ConfigurationError(std::string("expected an H_alpha estimate, got ") + to_string(H.kind));
  if (std::abs(H.alpha - alpha) > 1e-12)
    throw ConfigurationError("H_alpha estimate for alpha = " + std::to_string(H.alpha) +
                             " used with correlation alpha = " + std::to_string(alpha));
  if (!(H.value > 0.0)) throw ConfigurationError("H_alpha estimate must be positive");
}

inline void finish(AsymptoticResult& r) {
  r.value = std::exp(r.log_value);
  r.ingredients["psi_u"] = {gaussian_tail(r.u), Provenance::closed_form};
}

}  // namespace detail

/// mes(E) H_alpha Psi(u) / q(u).
inline AsymptoticResult stationary_asymptotic(const CorrelationProfile& corr, double mes_E, double u,
                                              const PickandsEstimate& H) {
  if (!(mes_E > 0.0)) throw SpecViolation("stationary_asymptotic: mes_E must be positive");
  detail::require_H(H, corr.alpha);
  AsymptoticResult r;
  r.formula = FormulaId::stationary;
  r.u = u;
  const double q = q_of_u(corr, u);
  r.ingredients["q_u"] = {q, detail::q_provenance(corr)};
  r.ingredients["H_alpha"] = {H.value, H.provenance};
  r.ingredients["mes_E"] = {mes_E, Provenance::closed_form};
  r.log_value = std::log(mes_E) + std::log(H.value) + log_gaussian_tail(u) - std::log(q);
  detail::finish(r);
  return r;
}

/// Laplace transform of dF on one side at lambda = u^2 with x_cut = 2 u^-2 log^A u.
inline LaplaceValue side_laplace(const ProcessSpec& spec, Side side, double u, const AsymptoticOptions& opt = {}) {
  const double x_cut = 2.0 * std::pow(std::log(u), opt.A) / (u * u);
  const OccupationCDF F = occupation_cdf(spec, side, x_cut, opt.grid_size);
  return laplace_transform(F, u * u);
}

/// H_alpha (L_+ [+ L_-]) Psi(u) / q(u) for stationary-like sides.
inline AsymptoticResult ss_asymptotic(const ProcessSpec& spec, double u, const PickandsEstimate& H,
                                      Domain sides = Domain::both, const AsymptoticOptions& opt = {}) {
  detail::require_H(H, spec.alpha());
  const CaseLabel label = classify(spec);
  const bool use_plus = sides != Domain::minus, use_minus = sides != Domain::plus;
  if ((use_plus && label.right != SideCase::S) || (use_minus && label.left != SideCase::S))
    throw ConfigurationError("ss_asymptotic: requested side is not stationary-like (case " + label.combined() + ")");
  AsymptoticResult r;
  r.formula = sides == Domain::both ? FormulaId::ss : FormulaId::s_one_side;
  r.case_label = label.combined();
  r.domain = sides;
  r.u = u;
  double L = 0.0;
  if (use_plus) {
    const auto lp = side_laplace(spec, Side::plus, u, opt);
    r.ingredients["L_plus"] = {lp.value, Provenance::quadrature};
    r.ingredients["L_plus_tail_bound"] = {lp.tail_bound, Provenance::quadrature};
    L += lp.value;
  }
  if (use_minus) {
    const auto lm = side_laplace(spec, Side::minus, u, opt);
    r.ingredients["L_minus"] = {lm.value, Provenance::quadrature};
    r.ingredients["L_minus_tail_bound"] = {lm.tail_bound, Provenance::quadrature};
    L += lm.value;
  }
  const double q = q_of_u(spec.correlation, u);
  r.ingredients["q_u"] = {q, detail::q_provenance(spec.correlation)};
  r.ingredients["H_alpha"] = {H.value, H.provenance};
  r.log_value = std::log(H.value) + std::log(L) + log_gaussian_tail(u) - std::log(q);
  detail::finish(r);
  return r;
}

/// Regular-variation data of one side: F(x) = x^a l(x) near 0.
struct RVSide {
  double a = 0.0;
  std::function<double(double)> ell = [](double) { return 1.0; };
};

/// H sum Gamma(1+a) u^{-2a} l(u^-2) u^{2/alpha} l#(u^-2)^{-1/alpha} Psi(u).
inline AsymptoticResult rv_closed_form(const ProcessSpec& spec, double u, const PickandsEstimate& H,
                                       const RVSide& plus, const RVSide& minus, Domain sides = Domain::both) {
  detail::require_H(H, spec.alpha());
  const double alpha = spec.alpha();
  const bool use_plus = sides != Domain::minus, use_minus = sides != Domain::plus;
  for (const RVSide* s : {use_plus ? &plus : nullptr, use_minus ? &minus : nullptr}) {
    if (!s) continue;
    if (!(s->a >= 0.0) || s->a > 1.0 / alpha + 1e-12)
      throw SpecViolation("rv_closed_form: precondition 0 <= a <= 1/alpha violated (a = " + std::to_string(s->a) + ")");
  }
  AsymptoticResult r;
  r.formula = sides == Domain::both ? FormulaId::ss : FormulaId::s_one_side;
  r.domain = sides;
  r.u = u;
  const double x = 1.0 / (u * u);
  auto laplace_rv = [&](const RVSide& s) { return std::tgamma(1.0 + s.a) * std::pow(x, s.a) * s.ell(x); };
  double L = 0.0;
  if (use_plus) {
    const double lp = laplace_rv(plus);
    r.ingredients["L_plus"] = {lp, Provenance::closed_form};
    L += lp;
  }
  if (use_minus) {
    const double lm = laplace_rv(minus);
    r.ingredients["L_minus"] = {lm, Provenance::closed_form};
    L += lm;
  }
  const auto ell = correlation_slowly_varying(spec.correlation);
  const auto conj = debruijn_conjugate_detail(ell, x, alpha);
  r.ingredients["ell_sharp"] = {conj.value, conj.route == ConjugateRoute::reciprocal ? Provenance::closed_form
                                                                                      : Provenance::numeric};
  r.ingredients["H_alpha"] = {H.value, H.provenance};
  const double inv_q = std::pow(u, 2.0 / alpha) * std::pow(conj.value, -1.0 / alpha);
  r.ingredients["q_u"] = {1.0 / inv_q, Provenance::numeric};
  r.log_value = std::log(H.value) + std::log(L) + std::log(inv_q) + log_gaussian_tail(u);
  detail::finish(r);
  return r;
}

/// Psi(u), identical for one- and two-sided domains.
inline AsymptoticResult talagrand_asymptotic(double u) {
  AsymptoticResult r;
  r.formula = FormulaId::tt;
  r.u = u;
  r.log_value = log_gaussian_tail(u);
  detail::finish(r);
  return r;
}

/// P Psi(u) with P = P_alpha (both sides) or P_alpha^+ (one side).
inline AsymptoticResult transition_asymptotic(double u, const PickandsEstimate& P, Domain sides) {
  const bool two = sides == Domain::both;
  const bool ok = two ? (P.kind == ConstantKind::P_alpha || P.kind == ConstantKind::P_alpha_T)
                      : (P.kind == ConstantKind::P_alpha_plus || P.kind == ConstantKind::P_alpha_plus_T);
  if (!ok)
    throw ConfigurationError(std::string("transition_asymptotic: constant ") + to_string(P.kind) +
                             " does not match the requested sides");
  if (!(P.value >= 1.0 - 1e-12)) throw ConfigurationError("transition_asymptotic: P constant must be >= 1");
  AsymptoticResult r;
  r.formula = two ? FormulaId::pp : FormulaId::p_one_side;
  r.domain = sides;
  r.u = u;
  r.ingredients[two ? "P_alpha" : "P_alpha_plus"] = {P.value, P.provenance};
  r.log_value = std::log(P.value) + log_gaussian_tail(u);
  detail::finish(r);
  return r;
}

/// Constants consumed by evaluate(); P_minus is the one-sided constant of the
/// left side (estimated on the mirror image).
struct ConstantsBundle {
  std::optional<PickandsEstimate> H;
  std::optional<PickandsEstimate> P;
  std::optional<PickandsEstimate> P_plus;
  std::optional<PickandsEstimate> P_minus;
};

namespace detail {

inline void require_b(double have, std::optional<double> want, const char* what) {
  if (!want) return;
  if (!(std::abs(have - *want) <= 1e-6 * std::max(1.0, std::abs(*want))))
    throw ConfigurationError(std::string("constant ") + what + " was computed for b = " + std::to_string(have) +
                             " but the case requires b = " + std::to_string(*want));
}

}  // namespace detail

/// Case dispatch for the domain [-S, S] (both) or one side of it.
inline AsymptoticResult evaluate(const ProcessSpec& spec, double u, const ConstantsBundle& k,
                                 Domain domain = Domain::both, const AsymptoticOptions& opt = {}) {
  if (spec.stationary()) {
    if (!k.H) throw ConfigurationError("evaluate: stationary case requires H_alpha");
    auto r = stationary_asymptotic(spec.correlation, domain == Domain::both ? 2.0 * spec.S : spec.S, u, *k.H);
    r.domain = domain;
    r.case_label = "stationary";
    return r;
  }
  const CaseLabel label = classify(spec);
  const bool has_plus = domain != Domain::minus, has_minus = domain != Domain::plus;
  const bool s_plus = has_plus && label.right == SideCase::S;
  const bool s_minus = has_minus && label.left == SideCase::S;
  AsymptoticResult r;
  if (s_plus || s_minus) {
    if (!k.H) throw ConfigurationError("evaluate: stationary-like side requires H_alpha");
    const Domain sides = (s_plus && s_minus) ? Domain::both : (s_plus ? Domain::plus : Domain::minus);
    r = ss_asymptotic(spec, u, *k.H, sides, opt);
    if (domain == Domain::both && sides != Domain::both)
      r.notes.push_back("only the stationary-like side contributes at leading order");
  } else {
    const bool p_plus = has_plus && label.right == SideCase::P;
    const bool p_minus = has_minus && label.left == SideCase::P;
    if (!p_plus && !p_minus) {
      r = talagrand_asymptotic(u);
    } else if (p_plus && p_minus) {
      if (!k.P) throw ConfigurationError("evaluate: P-P case requires the two-sided constant P_alpha");
      detail::require_b(k.P->b_plus, label.b_plus, "P_alpha (b_plus)");
      detail::require_b(k.P->b_minus, label.b_minus, "P_alpha (b_minus)");
      r = transition_asymptotic(u, *k.P, Domain::both);
    } else {
      const auto& P = p_plus ? k.P_plus : k.P_minus;
      if (!P) throw ConfigurationError("evaluate: transition side requires the one-sided constant P_alpha^+");
      detail::require_b(p_plus ? P->b_plus : P->b_minus, p_plus ? label.b_plus : label.b_minus, "P_alpha^+");
      r = transition_asymptotic(u, *P, Domain::plus);
    }
    if (domain == Domain::both)
      r.notes.push_back("two-sided probabilities are not sums of one-sided ones in T/P cases");
  }
  r.case_label = label.combined();
  r.domain = domain;
  return r;
}

/// Policy for filling a ConstantsBundle.
struct ConstantPolicy {
  std::size_t n_paths = 20000;
  std::uint64_t seed = 1;
  std::vector<double> H_schedule{4.0, 8.0, 16.0};
  std::vector<double> P_schedule{2.0, 4.0, 8.0};
  double grid_step = 0.0;  // 0 selects the default step
  bool prefer_closed_form = true;
};

/// Constants needed by evaluate(spec, ., ., domain): closed forms for
/// alpha in {1, 2}, simulation otherwise.
inline ConstantsBundle resolve_constants(const ProcessSpec& spec, Domain domain, const ConstantPolicy& pol = {}) {
  ConstantsBundle k;
  const double alpha = spec.alpha();
  auto step_for = [&](double T) { return pol.grid_step > 0.0 ? pol.grid_step : default_grid_step(alpha, T); };
  auto H = [&] {
    if (pol.prefer_closed_form)
      if (auto v = known_H_alpha(alpha)) return closed_form_estimate(ConstantKind::H_alpha, alpha, *v);
    return estimate_H_alpha(alpha, pol.H_schedule, step_for(pol.H_schedule.back()), pol.n_paths, pol.seed);
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto P = [&](double bp, double bm, Domain d) {
    const ConstantKind kind = d == Domain::both ? ConstantKind::P_alpha : ConstantKind::P_alpha_plus;
    if (pol.prefer_closed_form)
      if (auto v = known_P_alpha(alpha, bp, bm, d)) return closed_form_estimate(kind, alpha, *v, bp, bm);
    return estimate_P_alpha(alpha, bp, bm, pol.P_schedule, step_for(1.0), pol.n_paths, pol.seed, d);
  };
  if (spec.stationary()) {
    k.H = H();
    return k;
  }
  const CaseLabel label = classify(spec);
  const bool has_plus = domain != Domain::minus, has_minus = domain != Domain::plus;
  if ((has_plus && label.right == SideCase::S) || (has_minus && label.left == SideCase::S)) {
    k.H = H();
    return k;
  }
  const bool p_plus = has_plus && label.right == SideCase::P;
  const bool p_minus = has_minus && label.left == SideCase::P;
  if (p_plus && p_minus) k.P = P(*label.b_plus, *label.b_minus, Domain::both);
  else if (p_plus) k.P_plus = P(*label.b_plus, inf, Domain::plus);
  else if (p_minus) k.P_minus = P(inf, *label.b_minus, Domain::minus);
  return k;
}

}  // namespace gpx
