#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gpx/pickands.hpp"
#include "oracles.hpp"

using namespace gpx;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST(SampleChi, ZeroColumnIsZero) {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    LimitProcessSpec lps;
    lps.alpha = alpha;
    lps.T = 2.0;
    lps.grid_step = 0.05;
    lps.two_sided = true;
    const auto b = sample_chi_paths(lps, 64, 3);
    std::size_t zc = 0;
    while (b.times[zc] != 0.0) ++zc;
    for (std::size_t r = 0; r < b.rows; ++r) EXPECT_EQ(b.at(r, zc), 0.0);
  }
}

TEST(SampleChi, BrownianIncrementsUncorrelated) {
  LimitProcessSpec lps;
  lps.alpha = 1.0;
  lps.T = 0.2;
  lps.grid_step = 0.1;
  const std::size_t n = 100000;
  const auto b = sample_chi_paths(lps, n, 11);
  ASSERT_EQ(b.cols, 3u);
  // the drift is deterministic, so centred increments are sqrt2 dB
  double m1 = 0, m2 = 0, s11 = 0, s22 = 0, s12 = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double d1 = b.at(r, 1) - b.at(r, 0), d2 = b.at(r, 2) - b.at(r, 1);
    m1 += d1, m2 += d2, s11 += d1 * d1, s22 += d2 * d2, s12 += d1 * d2;
  }
  const double N = static_cast<double>(n);
  m1 /= N, m2 /= N;
  const double c = (s12 / N - m1 * m2) / std::sqrt((s11 / N - m1 * m1) * (s22 / N - m2 * m2));
  EXPECT_LT(std::abs(c), 3.0 / std::sqrt(N));
  // increment variance 2 * step, mean -step
  EXPECT_NEAR(s11 / N - m1 * m1, 0.2, 0.2 * 4.0 * std::sqrt(2.0 / N));
  EXPECT_NEAR(m1, -0.1, 4.0 * std::sqrt(0.2 / N));
}

TEST(SampleChi, AlphaTwoPathsAreParabolas) {
  LimitProcessSpec lps;
  lps.alpha = 2.0;
  lps.T = 3.0;
  lps.grid_step = 0.1;
  const auto b = sample_chi_paths(lps, 32, 5);
  for (std::size_t r = 0; r < b.rows; ++r) {
    // chi(t) = sqrt2 xi t - t^2: read xi off the first node
    const double t1 = b.times[1];
    const double xi = (b.at(r, 1) + t1 * t1) / (std::numbers::sqrt2 * t1);
    double worst = 0.0;
    for (std::size_t c = 0; c < b.cols; ++c) {
      const double t = b.times[c];
      worst = std::max(worst, std::abs(b.at(r, c) - (std::numbers::sqrt2 * xi * t - t * t)));
    }
    EXPECT_LT(worst, 1e-10);
  }
}

TEST(SampleChi, Deterministic) {
  LimitProcessSpec lps;
  lps.alpha = 1.3;
  lps.T = 1.0;
  lps.grid_step = 0.01;
  const auto a = sample_chi_paths(lps, 10, 42), b = sample_chi_paths(lps, 10, 42);
  EXPECT_EQ(a.values, b.values);
}

TEST(HAlphaT, AlphaTwoMatchesQuadrature) {
  const auto est = estimate_H_alpha_T(2.0, 8.0, 0.01, 20000, 7);
  EXPECT_NEAR(est.value, oracle::H2_of_T(8.0), 3.0 * est.std_error);
}

TEST(HAlphaT, TinyHorizonIsOne) {
  const auto est = estimate_H_alpha_T(1.0, 1e-6, 1e-6, 1000, 7);
  EXPECT_NEAR(est.value, 1.0, 1e-2);
}

TEST(HAlphaT, IncreasingInHorizon) {
  double prev = 1.0;
  for (double T : {0.5, 1.0, 2.0}) {
    const auto est = estimate_H_alpha_T(1.0, T, 0.005, 4000, 9);
    EXPECT_TRUE(std::isfinite(est.value));
    EXPECT_GE(est.value, 1.0);
    EXPECT_GT(est.value, prev);
    prev = est.value;
  }
}

TEST(HAlphaT, RefinementDoesNotDecreaseBeyondNoise) {
  const auto coarse = estimate_H_alpha_T(1.0, 2.0, 0.02, 8000, 13);
  const auto fine = estimate_H_alpha_T(1.0, 2.0, 0.01, 8000, 13);
  EXPECT_GE(fine.value, coarse.value - 2.0 * std::hypot(fine.std_error, coarse.std_error));
}

TEST(HAlphaT, SeedDeterminism) {
  const auto a = estimate_H_alpha_T(1.5, 2.0, 0.01, 2000, 21);
  const auto b = estimate_H_alpha_T(1.5, 2.0, 0.01, 2000, 21);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(HAlpha, AlphaTwoWithinFivePercent) {
  const auto est = estimate_H_alpha(2.0, {4.0, 8.0, 16.0}, 0.02, 20000, 1);
  EXPECT_NEAR(est.value, 1.0 / std::sqrt(std::numbers::pi), 0.05 / std::sqrt(std::numbers::pi));
}

TEST(HAlpha, PositiveAndBelowScheduleMinimum) {
  const auto est = estimate_H_alpha(1.5, {2.0, 4.0, 8.0}, 0.02, 3000, 2);
  EXPECT_GT(est.value, 0.0);
  double lowest = inf;
  for (const auto& p : est.per_T) lowest = std::min(lowest, p.value / p.T);
  EXPECT_LE(est.value, lowest + 3.0 * est.std_error);
}

TEST(HAlpha, ScheduleValidation) {
  EXPECT_THROW(estimate_H_alpha(1.0, {1.0, 2.0}, 0.01, 100, 1), SpecViolation);
  EXPECT_THROW(estimate_H_alpha(1.0, {1.0, 4.0, 2.0}, 0.01, 100, 1), SpecViolation);
  EXPECT_THROW(estimate_H_alpha(2.5, {1.0, 2.0, 4.0}, 0.01, 100, 1), SpecViolation);
}

TEST(PAlpha, DegenerateIsExactlyOne) {
  const auto est = estimate_P_alpha(1.0, inf, inf, {1.0, 2.0}, 0.01, 100, 1, Domain::both);
  EXPECT_EQ(est.value, 1.0);
  EXPECT_EQ(est.provenance, Provenance::closed_form);
}

TEST(PAlpha, TinyHorizonIsOne) {
  const auto est = estimate_P_alpha_T(1.0, 1.0, 1.0, 1e-6, Domain::both, 1e-6, 1000, 3);
  EXPECT_NEAR(est.value, 1.0, 1e-2);
}

TEST(PAlpha, AlphaTwoOneSidedMatchesQuadrature) {
  const auto est = estimate_P_alpha_T(2.0, 1.0, inf, 8.0, Domain::plus, 0.01, 20000, 4);
  EXPECT_NEAR(est.value, oracle::P2_plus(1.0), 3.0 * est.std_error);
}

TEST(PAlpha, AlphaTwoTwoSidedMatchesQuadrature) {
  // both sides: max over t of sqrt2 xi t - 2 t^2 is xi^2 / 4 for either sign of xi
  const double ref = oracle::integrate_half_line([](double n) { return 2.0 * std::exp(-0.25 * n * n) / std::sqrt(2.0 * std::numbers::pi); });
  const auto est = estimate_P_alpha_T(2.0, 1.0, 1.0, 8.0, Domain::both, 0.01, 20000, 4);
  EXPECT_NEAR(est.value, ref, 3.0 * est.std_error);
  EXPECT_NEAR(ref, *known_P_alpha(2.0, 1.0, 1.0, Domain::both), 1e-10);
}

TEST(PAlpha, TwoSidedDominatesOneSided) {
  for (double T : {0.5, 2.0}) {
    const auto one = estimate_P_alpha_T(1.0, 1.0, 1.0, T, Domain::plus, 0.01, 4000, 8);
    const auto two = estimate_P_alpha_T(1.0, 1.0, 1.0, T, Domain::both, 0.01, 4000, 8);
    EXPECT_GE(one.value, 1.0);
    EXPECT_GE(two.value, one.value - 3.0 * std::hypot(one.std_error, two.std_error));
  }
}

TEST(PAlpha, AlphaOneClosedForm) {
  const auto est = estimate_P_alpha(1.0, 1.0, inf, {2.0, 4.0, 8.0}, 0.0025, 8000, 6, Domain::plus);
  // grid maxima are biased low; allow 5%
  EXPECT_NEAR(est.value, 2.0, 0.1);
  EXPECT_EQ(*known_P_alpha(1.0, 1.0, inf, Domain::plus), 2.0);
}

TEST(PAlpha, NegativeDriftRejected) {
  EXPECT_THROW(estimate_P_alpha(1.0, -1.0, 1.0, {1.0}, 0.01, 10, 1), SpecViolation);
}

TEST(KnownConstants, Values) {
  EXPECT_EQ(*known_H_alpha(1.0), 1.0);
  EXPECT_NEAR(*known_H_alpha(2.0), 0.5641895835477563, 1e-15);
  EXPECT_FALSE(known_H_alpha(1.5).has_value());
  EXPECT_NEAR(*known_P_alpha(2.0, 1.0, inf, Domain::plus), oracle::P2_plus(1.0), 1e-10);
  EXPECT_EQ(*known_P_alpha(1.0, inf, inf, Domain::both), 1.0);
}
