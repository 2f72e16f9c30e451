#include <gtest/gtest.h>

#include <cmath>

#include "gpx/classifier.hpp"

using namespace gpx;

namespace {

ProcessSpec sided(SideParams minus, SideParams plus, double alpha = 1.0, double c_rho = 1.0, double S = 0.9) {
  return make_process_spec("sided", S, VarianceProfile::power(plus, minus), CorrelationProfile::power_exp(c_rho, alpha));
}

SideParams of_case(SideCase c) {
  switch (c) {
    case SideCase::S: return {1.0, 2.0, 0.0};
    case SideCase::T: return {0.5, 0.5, 0.0};
    case SideCase::P: return {0.5, 1.0, 0.0};
  }
  return {};
}

}  // namespace

TEST(H1Limit, BetaAboveAlphaIsZero) {
  const auto spec = sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0});
  EXPECT_EQ(h1_limit(spec, Side::plus, 1.0).value, 0.0);
}

TEST(H1Limit, EqualIndicesGiveCoefficient) {
  const auto spec = sided({0.7, 1.0, 0.0}, {0.7, 1.0, 0.0});
  EXPECT_NEAR(h1_limit(spec, Side::plus, 1.0).value, 0.7, 1e-15);
  EXPECT_NEAR(h1_limit(spec, Side::plus, 0.5).value, 0.35, 1e-15);
  EXPECT_NEAR(h1_limit(spec, Side::minus, -2.0).value, 1.4, 1e-15);
}

TEST(H1Limit, BetaBelowAlphaIsInfinite) {
  const auto spec = sided({1.0, 0.5, 0.0}, {1.0, 0.5, 0.0}, 2.0);
  EXPECT_TRUE(std::isinf(h1_limit(spec, Side::plus, 1.0).value));
}

TEST(H1Limit, SignOfReference) {
  const auto spec = sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0});
  EXPECT_THROW(h1_limit(spec, Side::plus, -1.0), SpecViolation);
  EXPECT_THROW(h1_limit(spec, Side::minus, 0.0), SpecViolation);
}

TEST(H1Limit, NumericRouteForTables) {
  // 1 - sigma^2 = |t| as a table; q(u) solves 1 - exp(-q) = u^-2
  const auto spec = make_process_spec("tab", 1.0, VarianceProfile::tabulated({-1, 0, 1}, {0.0, 1.0, 0.0}),
                                      CorrelationProfile::power_exp(1.0, 1.0));
  const auto h = h1_limit(spec, Side::plus, 1.0);
  EXPECT_FALSE(h.symbolic);
  EXPECT_EQ(h.sequence.size(), 4u);
  EXPECT_NEAR(h.value, 1.0, 1e-6);
}

TEST(H1Limit, OscillatingTableIsIndeterminate) {
  // u^2 (1 - sigma^2(q t)) alternates between about 1 and 2 over the u schedule
  const auto spec = make_process_spec(
      "osc", 1.0,
      VarianceProfile::tabulated({-1, -1e-4, -1e-6, -1e-8, -1e-10, 0, 1e-10, 1e-8, 1e-6, 1e-4, 1},
                                 {0.5, 1 - 2e-4, 1 - 1e-6, 1 - 2e-8, 1 - 1e-10, 1.0, 1 - 1e-10, 1 - 2e-8, 1 - 1e-6,
                                  1 - 2e-4, 0.5}),
      CorrelationProfile::fbm_type(1.0, 1.0));
  EXPECT_THROW(h1_limit(spec, Side::plus, 1.0), IndeterminateClassification);
}

TEST(Classify, DecisionTable) {
  for (SideCase l : {SideCase::S, SideCase::T, SideCase::P}) {
    for (SideCase r : {SideCase::S, SideCase::T, SideCase::P}) {
      const auto label = classify(sided(of_case(l), of_case(r)));
      EXPECT_EQ(label.left, l) << to_string(l) << "-" << to_string(r);
      EXPECT_EQ(label.right, r) << to_string(l) << "-" << to_string(r);
      EXPECT_EQ(label.b_minus.has_value(), l == SideCase::P);
      EXPECT_EQ(label.b_plus.has_value(), r == SideCase::P);
      if (label.b_plus) EXPECT_NEAR(*label.b_plus, 0.5, 1e-15);
    }
  }
}

TEST(Classify, NamedCases) {
  EXPECT_EQ(classify(sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0})).combined(), "S-S");
  const auto pp = classify(sided({1.0, 1.0, 0.0}, {1.0, 1.0, 0.0}, 1.0, 1.0, 0.5));
  EXPECT_EQ(pp.combined(), "P-P");
  EXPECT_NEAR(*pp.b_plus, 1.0, 1e-15);
  EXPECT_NEAR(*pp.b_minus, 1.0, 1e-15);
  const auto tp = classify(sided({1.0, 0.5, 0.0}, {1.0, 1.0, 0.0}, 1.0, 1.0, 0.5));
  EXPECT_EQ(tp.combined(), "T-P");
}

TEST(Classify, LogFactorsDecideAtEqualIndex) {
  const auto spec = make_process_spec("ex2", 0.5, VarianceProfile::power_log(1.0, 1.0, 1.0),
                                      CorrelationProfile::power_log_corrected(1.0, 1.0, 2.0));
  EXPECT_EQ(classify(spec).combined(), "S-S");
}

TEST(Classify, ScaleConsistent) {
  for (double k : {0.1, 3.0}) {
    const auto a = classify(sided({0.5, 1.0, 0.0}, {1.0, 2.0, 0.0}, 1.0, 1.0, 0.5));
    const auto b = classify(sided({0.5 * k, 1.0, 0.0}, {1.0 * k, 2.0, 0.0}, 1.0, k, 0.5));
    EXPECT_EQ(a.combined(), b.combined());
    EXPECT_NEAR(*a.b_minus, *b.b_minus, 1e-14);
  }
}

TEST(InformativeInterval, QuadraticDeficit) {
  const auto spec = sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0});
  const auto b = informative_interval(spec, 10.0, 2.0);
  EXPECT_NEAR(b.T_plus, 0.1 * std::log(10.0), 1e-14);
  EXPECT_NEAR(b.T_plus, 0.23026, 1e-5);
  EXPECT_EQ(b.T_minus, -b.T_plus);
}

TEST(InformativeInterval, ExpGentleBackSubstitution) {
  const auto spec = make_process_spec("e", 1.0, VarianceProfile::exp_gentle(1.0, 1.0),
                                      CorrelationProfile::power_exp(1.0, 1.0));
  const double u = std::exp(5.0), A = 2.0;
  const auto b = informative_interval(spec, u, A);
  EXPECT_NEAR(b.T_plus, 1.0 / (10.0 - A * std::log(5.0)), 1e-12);
  EXPECT_LT(std::abs(std::exp(-1.0 / b.T_plus) - b.threshold), 1e-12);
}

TEST(InformativeInterval, ClampedWhenThresholdExceedsDeficit) {
  const auto spec = sided({0.05, 2.0, 0.0}, {0.05, 2.0, 0.0}, 1.0, 1.0, 1.0);
  const auto b = informative_interval(spec, 2.0, 4.0);
  EXPECT_TRUE(b.clamped_plus);
  EXPECT_EQ(b.T_plus, 1.0);
  EXPECT_EQ(b.T_minus, -1.0);
}

TEST(InformativeInterval, ShrinksAndOutrunsQ) {
  const auto spec = sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0});
  double prev = 1.0;
  for (double u : {1e2, 1e3, 1e4, 1e5}) {
    const auto b = informative_interval(spec, u);
    EXPECT_LT(b.T_plus, prev);
    prev = b.T_plus;
  }
  EXPECT_GT(informative_interval(spec, 1e5).T_plus / q_of_u(spec.correlation, 1e5), 1e3);
}

TEST(InformativeInterval, Preconditions) {
  const auto spec = sided({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0});
  EXPECT_THROW(informative_interval(spec, 1.0), SpecViolation);
  EXPECT_THROW(informative_interval(spec, 10.0, 0.5), SpecViolation);
}
