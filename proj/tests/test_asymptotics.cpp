#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "gpx/asymptotics.hpp"
#include "oracles.hpp"

using namespace gpx;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

PickandsEstimate H(double alpha) { return closed_form_estimate(ConstantKind::H_alpha, alpha, *known_H_alpha(alpha)); }

ProcessSpec sided(SideParams minus, SideParams plus, double alpha = 1.0, double S = 0.9) {
  return make_process_spec("sided", S, VarianceProfile::power(plus, minus), CorrelationProfile::power_exp(1.0, alpha));
}

}  // namespace

TEST(GaussianTail, Values) {
  EXPECT_EQ(gaussian_tail(0.0), 0.5);
  EXPECT_NEAR(gaussian_tail(3.0), 1.34990e-3, 1e-8);
  for (double u : {-10.0, -1.0, 0.5, 3.0, 8.0, 20.0, 37.0})
    EXPECT_NEAR(gaussian_tail(u) / oracle::normal_tail(u), 1.0, 1e-12) << u;
  EXPECT_NEAR(gaussian_tail(10.0), 7.6e-24, 1e-25);
}

TEST(GaussianTail, LogFormFiniteFarOut) {
  EXPECT_NEAR(log_gaussian_tail(3.0), std::log(gaussian_tail(3.0)), 1e-12);
  EXPECT_TRUE(std::isfinite(log_gaussian_tail(1e4)));
}

TEST(Stationary, LinearCorrelationComposition) {
  const auto r = stationary_asymptotic(CorrelationProfile::fbm_type(1.0, 1.0), 1.0, 3.0, H(1.0));
  EXPECT_NEAR(r.value, 9.0 * oracle::normal_tail(3.0), 1e-15);
  EXPECT_NEAR(r.value, 0.012149, 1e-6);
  const auto r2 = stationary_asymptotic(CorrelationProfile::fbm_type(1.0, 1.0), 2.0, 3.0, H(1.0));
  EXPECT_NEAR(r2.value / r.value, 2.0, 1e-14);
}

TEST(Stationary, QuadraticCorrelationComposition) {
  const auto r = stationary_asymptotic(CorrelationProfile::fbm_type(1.0, 2.0), 1.0, 3.0, H(2.0));
  EXPECT_NEAR(r.value, 3.0 / std::sqrt(std::numbers::pi) * oracle::normal_tail(3.0), 1e-15);
  EXPECT_NEAR(r.value, 2.2848e-3, 1e-7);
}

TEST(Stationary, AlphaMismatch) {
  EXPECT_THROW(stationary_asymptotic(CorrelationProfile::power_exp(1.0, 1.0), 1.0, 3.0, H(2.0)), ConfigurationError);
  auto P = closed_form_estimate(ConstantKind::P_alpha, 1.0, 2.0);
  EXPECT_THROW(stationary_asymptotic(CorrelationProfile::power_exp(1.0, 1.0), 1.0, 3.0, P), ConfigurationError);
}

TEST(SideLaplace, PowerSixtyFourExact) {
  // f = t^64: F(x) = x^(1/64) on the informative range
  const auto spec = make_process_spec("flat", 0.98, VarianceProfile::power(2.0, 64.0), CorrelationProfile::power_exp(1.0, 1.0));
  const double u = 1e3;
  const double L = side_laplace(spec, Side::plus, u).value;
  EXPECT_NEAR(L, std::tgamma(1.0 + 1.0 / 64.0) * std::pow(u * u, -1.0 / 64.0), 1e-6);
}

TEST(SideLaplace, FlatLimitApproachesOne) {
  const auto spec = make_process_spec("flat", 0.999, VarianceProfile::power(2.0, 1024.0), CorrelationProfile::power_exp(1.0, 1.0));
  EXPECT_NEAR(side_laplace(spec, Side::plus, 1e3).value, 1.0, 0.05);
}

TEST(SS, ExampleOneClosedForm) {
  for (double beta : {1.0, 2.0}) {
    const auto spec = make_process_spec("e", 1.0, VarianceProfile::exp_gentle(1.0, beta), CorrelationProfile::power_exp(1.0, 1.0));
    const double u = 1e4;
    const auto r = ss_asymptotic(spec, u, H(1.0));
    // Psi(1e4) underflows, so compare logs
    const double log_closed = (1.0 - 1.0 / beta) * std::log(2.0) - std::log(std::log(u)) / beta +
                              oracle::log_normal_tail_large(u) - std::log(q_of_u(spec.correlation, u));
    EXPECT_NEAR(std::exp(r.log_value - log_closed), 1.0, 0.1) << beta;
  }
}

TEST(SS, SymmetricIsTwiceOneSided) {
  const auto spec = sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0});
  const auto both = ss_asymptotic(spec, 50.0, H(1.0), Domain::both);
  const auto plus = ss_asymptotic(spec, 50.0, H(1.0), Domain::plus);
  EXPECT_NEAR(both.log_value - plus.log_value, std::log(2.0), 1e-12);
  EXPECT_EQ(both.formula, FormulaId::ss);
  EXPECT_EQ(plus.formula, FormulaId::s_one_side);
}

TEST(SS, RejectsNonStationarySide) {
  const auto spec = sided({1.0, 0.5, 0.0}, {1.0, 2.0, 0.0});
  EXPECT_THROW(ss_asymptotic(spec, 50.0, H(1.0), Domain::both), ConfigurationError);
  EXPECT_NO_THROW(ss_asymptotic(spec, 50.0, H(1.0), Domain::plus));
}

TEST(SS, IndependentOfS) {
  auto make = [](double S) {
    return make_process_spec("s", S, VarianceProfile::power(0.2, 2.0), CorrelationProfile::power_exp(1.0, 1.0));
  };
  const double a = ss_asymptotic(make(1.0), 100.0, H(1.0)).log_value;
  const double b = ss_asymptotic(make(2.0), 100.0, H(1.0)).log_value;
  EXPECT_NEAR(a - b, 0.0, 1e-6);
}

TEST(RV, DualRouteAgreement) {
  for (double beta : {2.0, 4.0, 8.0}) {
    // C = 2 makes f = t^beta, so F = x^(1/beta) with constant slowly varying part
    const auto spec = make_process_spec("p", 0.5, VarianceProfile::power(2.0, beta), CorrelationProfile::power_exp(1.0, 1.0));
    const double u = 1e3;
    const RVSide side{1.0 / beta};
    const auto rv = rv_closed_form(spec, u, H(1.0), side, side);
    const auto ss = ss_asymptotic(spec, u, H(1.0));
    EXPECT_NEAR(std::exp(rv.log_value - ss.log_value), 1.0, 0.05) << beta;
  }
}

TEST(RV, ExampleOneSlowlyVarying) {
  const double beta = 2.0, u = 1e4;
  const auto spec = make_process_spec("e", 1.0, VarianceProfile::exp_gentle(1.0, beta), CorrelationProfile::fbm_type(1.0, 1.0));
  // f = e^{-t^-beta} / 2, so F(x) = log^{-1/beta}(1/(2x))
  const RVSide side{0.0, [beta](double x) { return std::pow(std::log(1.0 / (2.0 * x)), -1.0 / beta); }};
  const auto rv = rv_closed_form(spec, u, H(1.0), side, side);
  const double log_closed = (1.0 - 1.0 / beta) * std::log(2.0) - std::log(std::log(u)) / beta +
                            oracle::log_normal_tail_large(u) + 2.0 * std::log(u);
  EXPECT_NEAR(std::exp(rv.log_value - log_closed), 1.0, 0.1);
}

TEST(RV, GammaOfOneReducesToStationaryShape) {
  const auto spec = make_process_spec("p", 0.5, VarianceProfile::power(2.0, 2.0), CorrelationProfile::fbm_type(1.0, 1.0));
  const auto rv = rv_closed_form(spec, 10.0, H(1.0), RVSide{0.0}, RVSide{0.0});
  EXPECT_NEAR(rv.value, 2.0 * 100.0 * oracle::normal_tail(10.0), 1e-12 * rv.value);
}

TEST(RV, PreconditionOnIndex) {
  const auto spec = make_process_spec("p", 0.25, VarianceProfile::power(2.0, 0.5), CorrelationProfile::power_exp(1.0, 1.0));
  EXPECT_THROW(rv_closed_form(spec, 10.0, H(1.0), RVSide{2.0}, RVSide{2.0}), SpecViolation);
}

TEST(Talagrand, IsTheTail) {
  EXPECT_NEAR(talagrand_asymptotic(3.0).value, 1.34990e-3, 1e-8);
  EXPECT_NEAR(talagrand_asymptotic(3.0).value, gaussian_tail(3.0), 1e-15 * gaussian_tail(3.0));
}

TEST(Transition, DegenerateEqualsTalagrand) {
  auto P = closed_form_estimate(ConstantKind::P_alpha_plus, 1.0, *known_P_alpha(1.0, inf, inf, Domain::plus));
  EXPECT_EQ(transition_asymptotic(3.0, P, Domain::plus).value, talagrand_asymptotic(3.0).value);
}

TEST(Transition, TwoSidedDominates) {
  auto P2 = closed_form_estimate(ConstantKind::P_alpha, 2.0, *known_P_alpha(2.0, 1.0, 1.0, Domain::both), 1.0, 1.0);
  auto P1 = closed_form_estimate(ConstantKind::P_alpha_plus, 2.0, *known_P_alpha(2.0, 1.0, inf, Domain::plus), 1.0, inf);
  EXPECT_GE(transition_asymptotic(3.0, P2, Domain::both).value, transition_asymptotic(3.0, P1, Domain::plus).value);
  EXPECT_NEAR(transition_asymptotic(3.0, P1, Domain::plus).value, oracle::P2_plus(1.0) * oracle::normal_tail(3.0), 1e-12);
}

TEST(Transition, KindMismatch) {
  auto P = closed_form_estimate(ConstantKind::P_alpha_plus, 1.0, 2.0, 1.0, inf);
  EXPECT_THROW(transition_asymptotic(3.0, P, Domain::both), ConfigurationError);
}

TEST(Evaluate, Dispatch) {
  const double u = 10.0;
  const auto ss = sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0});
  const auto st = sided({0.5, 0.5, 0.0}, {1.0, 2.0, 0.0});
  const auto tt = sided({0.5, 0.5, 0.0}, {0.5, 0.5, 0.0});
  const auto pp = sided({0.5, 1.0, 0.0}, {0.5, 1.0, 0.0});
  const auto tp = sided({0.5, 0.5, 0.0}, {0.5, 1.0, 0.0});

  const auto rss = evaluate(ss, u, resolve_constants(ss, Domain::both));
  EXPECT_EQ(rss.formula, FormulaId::ss);
  EXPECT_NEAR(rss.value, 2.0 * ss_asymptotic(ss, u, H(1.0), Domain::plus).value, 1e-12 * rss.value);

  const auto rst = evaluate(st, u, resolve_constants(st, Domain::both));
  EXPECT_EQ(rst.case_label, "T-S");
  EXPECT_EQ(rst.value, ss_asymptotic(st, u, H(1.0), Domain::plus).value);

  EXPECT_NEAR(evaluate(tt, u, resolve_constants(tt, Domain::both)).value, gaussian_tail(u), 1e-14 * gaussian_tail(u));

  const auto rpp = evaluate(pp, u, resolve_constants(pp, Domain::both));
  EXPECT_EQ(rpp.formula, FormulaId::pp);
  EXPECT_NEAR(rpp.value, (1.0 + 2.0 + 2.0 - 0.5) * gaussian_tail(u), 1e-12 * rpp.value);

  const auto rtp = evaluate(tp, u, resolve_constants(tp, Domain::both));
  EXPECT_EQ(rtp.formula, FormulaId::p_one_side);
  EXPECT_NEAR(rtp.value, 3.0 * gaussian_tail(u), 1e-12 * rtp.value);
}

TEST(Evaluate, MissingConstants) {
  const auto ss = sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0});
  EXPECT_THROW(evaluate(ss, 10.0, ConstantsBundle{}), ConfigurationError);
  const auto pp = sided({0.5, 1.0, 0.0}, {0.5, 1.0, 0.0});
  EXPECT_THROW(evaluate(pp, 10.0, ConstantsBundle{}), ConfigurationError);
  ConstantsBundle wrong_b;
  wrong_b.P = closed_form_estimate(ConstantKind::P_alpha, 1.0, 3.0, 2.0, 2.0);
  EXPECT_THROW(evaluate(pp, 10.0, wrong_b), ConfigurationError);
}

TEST(Evaluate, LowerBoundAndDominance) {
  const double u = 10.0;
  std::vector<double> values;
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto spec = sided({0.5, beta, 0.0}, {0.5, beta, 0.0});
    const auto r = evaluate(spec, u, resolve_constants(spec, Domain::both));
    EXPECT_GE(r.value, gaussian_tail(u) * (1.0 - 1e-12));
    values.push_back(r.value);
  }
  EXPECT_LE(values[0], values[1]);
  EXPECT_LE(values[1], values[2]);
}
