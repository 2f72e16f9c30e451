#pragma once

// Limit process chi(t) = sqrt(2) B_{alpha/2}(t) - |t|^alpha and Monte Carlo
// estimation of the Pickands constant H_alpha and of the transition
// constants P_alpha^+(T), P_alpha(T) with drift h1(t) = b_{+-} |t|^alpha.
//
// The default estimator uses the shift identity of exp(chi): for a grid D,
//   E max_D e^{chi_1(t)} = sum_s E[ max_t e^{chi(t-s) - h1(t)} / sum_r e^{chi(r-s)} ],
// where chi is the two-sided process pinned at 0. The summand is bounded by 1,
// so the estimator has finite variance for every T. The crude estimator
// E max e^{chi_1} is available for cross-checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "gpx/errors.hpp"
#include "gpx/gaussian_sampler.hpp"
#include "gpx/parallel.hpp"
#include "gpx/process_model.hpp"
#include "gpx/special.hpp"

namespace gpx {

enum class DriftKind { pickands, transition, degenerate };

struct LimitProcessSpec {
  double alpha = 1.0;
  DriftKind drift = DriftKind::pickands;
  double T = 1.0;
  double grid_step = 0.01;
  bool two_sided = false;
  double b_plus = std::numeric_limits<double>::infinity();
  double b_minus = std::numeric_limits<double>::infinity();
};

enum class ConstantKind { H_alpha_T, H_alpha, P_alpha_plus_T, P_alpha_T, P_alpha_plus, P_alpha };

inline const char* to_string(ConstantKind k) {
  switch (k) {
    case ConstantKind::H_alpha_T: return "H_alpha_T";
    case ConstantKind::H_alpha: return "H_alpha";
    case ConstantKind::P_alpha_plus_T: return "P_alpha_plus_T";
    case ConstantKind::P_alpha_T: return "P_alpha_T";
    case ConstantKind::P_alpha_plus: return "P_alpha_plus";
    case ConstantKind::P_alpha: return "P_alpha";
  }
  return "?";
}

enum class Estimator { crude, shift };
enum class Provenance { closed_form, simulated, quadrature, numeric };

inline const char* to_string(Estimator e) { return e == Estimator::crude ? "crude" : "shift"; }

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed-form";
    case Provenance::simulated: return "simulated";
    case Provenance::quadrature: return "quadrature";
    case Provenance::numeric: return "numeric";
  }
  return "?";
}

struct PickandsOptions {
  Estimator estimator = Estimator::shift;
  std::size_t shifts_per_path = 4;
  bool refinement_check = true;
  std::size_t unit_paths = 256;
};

struct HorizonPoint {
  double T = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  double grid_step = 0.0;
  std::size_t paths = 0;
};

struct PickandsEstimate {
  ConstantKind kind = ConstantKind::H_alpha;
  double alpha = 1.0;
  double b_plus = std::numeric_limits<double>::infinity();
  double b_minus = std::numeric_limits<double>::infinity();
  double value = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
  std::vector<double> T_schedule;
  std::vector<HorizonPoint> per_T;
  std::vector<double> fit_residuals;
  double fit_slope = 0.0;
  double grid_step = 0.0;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::shift;
  Provenance provenance = Provenance::simulated;
  double refinement_delta = 0.0;
  double refinement_std_error = 0.0;
  bool refinement_flagged = false;
  bool extrapolation_warning = false;
  std::vector<std::string> notes;
};

inline double default_grid_step(double alpha, double T) {
  return alpha >= 1.0 ? 0.01 * std::min(1.0, T) : 0.002;
}

namespace detail {

// Grid of D: positions 0..N-1, time (pos - offset) * step.
struct ChiGrid {
  std::size_t n = 0;  // cells per side
  double step = 0.0;
  bool two_sided = false;
  std::size_t size() const { return two_sided ? 2 * n + 1 : n + 1; }
  std::size_t offset() const { return two_sided ? n : 0; }
  double time(std::size_t pos) const {
    return (static_cast<double>(pos) - static_cast<double>(offset())) * step;
  }
};

inline ChiGrid make_chi_grid(double T, double grid_step, bool two_sided) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw SpecViolation("limit process: T must be finite and >= 0");
  if (!(grid_step > 0.0)) throw SpecViolation("limit process: grid_step must be positive");
  const double cells = T / grid_step;
  if (cells > 65536.0 * (1.0 + 1e-12)) throw SpecViolation("limit process: T / grid_step exceeds 2^16");
  ChiGrid g;
  g.two_sided = two_sided;
  g.n = static_cast<std::size_t>(std::llround(cells));
  if (T > 0.0 && g.n == 0) g.n = 1;
  g.step = g.n ? T / static_cast<double>(g.n) : grid_step;
  return g;
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw SpecViolation("limit process: alpha must lie in (0, 2]");
}

// Sampler of the 2L increments of sqrt(2) fBm on a grid of the given step.
inline GaussianSampler increment_sampler(double alpha, double step, std::size_t count) {
  const double scale = std::pow(step, alpha);
  auto acov = [alpha, scale](std::size_t j) {
    const double k = static_cast<double>(j);
    return scale * (std::pow(k + 1.0, alpha) - 2.0 * std::pow(k, alpha) + std::pow(std::abs(k - 1.0), alpha));
  };
  return GaussianSampler::stationary(acov, count, 4096);
}

// Converts increments e[0..2L-1] into the process at lags -L..L pinned at 0.
inline void pinned_from_increments(std::span<const double> e, std::span<double> y) {
  const std::size_t L = e.size() / 2;
  y[0] = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) y[k + 1] = y[k] + e[k];
  const double centre = y[L];
  for (double& v : y) v -= centre;
}

struct Moments {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double std_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

// Drift h1 on the positions of D; +inf excludes a side with infinite b.
inline std::vector<double> transition_drift(const ChiGrid& g, double alpha, double b_plus, double b_minus) {
  std::vector<double> h(g.size(), 0.0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double t = g.time(p);
    if (t == 0.0) continue;
    const double b = t > 0.0 ? b_plus : b_minus;
    h[p] = std::isinf(b) ? std::numeric_limits<double>::infinity() : b * std::pow(std::abs(t), alpha);
  }
  return h;
}

struct RunResult {
  Moments moments;
};

// One Monte Carlo run of E max_D e^{chi(t) - h1(t)} on the grid g.
// `proposal` is the shift distribution over positions (empty = uniform).
inline RunResult run_constant(double alpha, const ChiGrid& g, const std::vector<double>& h1,
                              const std::vector<double>& proposal, std::size_t n_paths, std::uint64_t seed,
                              std::uint64_t tag, const PickandsOptions& opt) {
  RunResult rr;
  const std::size_t N = g.size();
  if (N == 1) {
    rr.moments.add(1.0);
    rr.moments.add(1.0);
    return rr;
  }
  const bool shift = opt.estimator == Estimator::shift;
  // Shift estimator: lags -(N-1)..(N-1). Crude: the grid D itself.
  const std::size_t L = shift ? N - 1 : g.n;
  const std::size_t incr = shift ? 2 * L : N - 1;
  const GaussianSampler sampler = increment_sampler(alpha, g.step, incr);

  std::vector<double> lag_drift(2 * L + 1);
  for (std::size_t k = 0; k < lag_drift.size(); ++k)
    lag_drift[k] = std::pow(std::abs(static_cast<double>(k) - static_cast<double>(L)) * g.step, alpha);

  std::vector<double> cdf;
  if (shift && !proposal.empty()) {
    cdf.resize(N);
    std::partial_sum(proposal.begin(), proposal.end(), cdf.begin());
    for (double& c : cdf) c /= cdf.back();
  }

  const std::size_t unit = std::max<std::size_t>(2, opt.unit_paths + (opt.unit_paths & 1));
  const std::size_t n_units = (n_paths + unit - 1) / unit;
  std::vector<Moments> partial(n_units);

  struct Ws {
    SamplerWorkspace sw;
    std::vector<double> a, b, y, chi;
  };
  auto make_ws = [&] {
    Ws ws{sampler.workspace(), std::vector<double>(incr), std::vector<double>(incr), std::vector<double>(incr + 1),
          std::vector<double>(incr + 1)};
    return ws;
  };

  auto path_value = [&](Ws& ws, Rng& rng) {
    if (!shift) {
      // chi on D directly; for the one-sided grid y[0] = 0 is the origin.
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < N; ++p) {
        const double t = g.time(p);
        const double v = ws.y[p] - std::pow(std::abs(t), alpha) - h1[p];
        best = std::max(best, v);
      }
      return std::exp(best);
    }
    double acc = 0.0;
    boost::random::uniform_int_distribution<std::size_t> uni(0, N - 1);
    boost::random::uniform_01<double> u01;
    for (std::size_t k = 0; k < opt.shifts_per_path; ++k) {
      std::size_t s;
      double weight;  // 1 / pi(s)
      if (cdf.empty()) {
        s = uni(rng);
        weight = static_cast<double>(N);
      } else {
        const double r = u01(rng);
        s = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
        s = std::min(s, N - 1);
        weight = 1.0 / (cdf[s] - (s ? cdf[s - 1] : 0.0));
      }
      // chi'(p - s) lives at index L + p - s.
      double num = -std::numeric_limits<double>::infinity();
      double top = -std::numeric_limits<double>::infinity();
      const double* c = ws.chi.data() + L - s;
      for (std::size_t p = 0; p < N; ++p) {
        top = std::max(top, c[p]);
        num = std::max(num, c[p] - h1[p]);
      }
      double den = 0.0;
      for (std::size_t p = 0; p < N; ++p) den += std::exp(c[p] - top);
      acc += std::exp(num - top) / den * weight;
    }
    return acc / static_cast<double>(opt.shifts_per_path);
  };

  run_units(n_units, make_ws, [&](Ws& ws, std::size_t u) {
    Rng rng = make_stream(seed, u, tag);
    const std::size_t begin = u * unit;
    const std::size_t end = std::min(n_paths, begin + unit);
    Moments m;
    for (std::size_t p = begin; p < end; p += 2) {
      sampler.sample_pair(rng, ws.sw, ws.a, ws.b);
      for (int half = 0; half < 2 && p + half < end; ++half) {
        const auto& e = half ? ws.b : ws.a;
        if (shift) {
          pinned_from_increments(e, ws.chi);
          for (std::size_t k = 0; k < ws.chi.size(); ++k) ws.chi[k] -= lag_drift[k];
        } else if (g.two_sided) {
          pinned_from_increments(e, ws.y);
        } else {
          ws.y[0] = 0.0;
          for (std::size_t k = 0; k < incr; ++k) ws.y[k + 1] = ws.y[k] + e[k];
        }
        m.add(path_value(ws, rng));
      }
    }
    partial[u] = m;
  });
  for (const auto& m : partial) rr.moments.merge(m);
  return rr;
}

// Pilot estimate of s -> E G_s on a coarse set, interpolated to all positions
// and mixed with the uniform law: pi = 0.3 uniform + 0.7 pilot profile.
inline std::vector<double> pilot_proposal(double alpha, const ChiGrid& g, const std::vector<double>& h1,
                                          std::size_t n_pilot, std::uint64_t seed, std::uint64_t tag) {
  const std::size_t N = g.size();
  const std::size_t L = N - 1;
  const std::size_t stride = std::max<std::size_t>(1, N / 64);
  std::vector<std::size_t> coarse;
  for (std::size_t s = 0; s < N; s += stride) coarse.push_back(s);
  if (coarse.back() != N - 1) coarse.push_back(N - 1);
  const GaussianSampler sampler = increment_sampler(alpha, g.step, 2 * L);
  std::vector<double> lag_drift(2 * L + 1);
  for (std::size_t k = 0; k < lag_drift.size(); ++k)
    lag_drift[k] = std::pow(std::abs(static_cast<double>(k) - static_cast<double>(L)) * g.step, alpha);

  std::vector<double> profile(coarse.size(), 0.0);
  auto ws = sampler.workspace();
  std::vector<double> a(2 * L), b(2 * L), chi(2 * L + 1);
  Rng rng = make_stream(seed, 0, tag);
  for (std::size_t p = 0; p < n_pilot; p += 2) {
    sampler.sample_pair(rng, ws, a, b);
    for (const auto* e : {&a, &b}) {
      pinned_from_increments(*e, chi);
      for (std::size_t k = 0; k < chi.size(); ++k) chi[k] -= lag_drift[k];
      for (std::size_t i = 0; i < coarse.size(); ++i) {
        const double* c = chi.data() + L - coarse[i];
        double num = -std::numeric_limits<double>::infinity(), top = num;
        for (std::size_t q = 0; q < N; ++q) top = std::max(top, c[q]), num = std::max(num, c[q] - h1[q]);
        double den = 0.0;
        for (std::size_t q = 0; q < N; ++q) den += std::exp(c[q] - top);
        profile[i] += std::exp(num - top) / den;
      }
    }
  }
  std::vector<double> w(N, 0.0);
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
    for (std::size_t s = coarse[i]; s <= coarse[i + 1]; ++s) {
      const double f = static_cast<double>(s - coarse[i]) / static_cast<double>(coarse[i + 1] - coarse[i]);
      w[s] = (1.0 - f) * profile[i] + f * profile[i + 1];
    }
  }
  const double top = *std::max_element(w.begin(), w.end());
  double total = 0.0;
  for (double& v : w) total += (v = std::max(v, 1e-3 * top));
  std::vector<double> pi(N);
  for (std::size_t s = 0; s < N; ++s)
    pi[s] = total > 0.0 ? 0.3 / static_cast<double>(N) + 0.7 * w[s] / total : 1.0 / static_cast<double>(N);
  return pi;
}

inline HorizonPoint horizon_point(double alpha, double T, double grid_step, bool two_sided, double b_plus,
                                  double b_minus, bool transition, std::size_t n_paths, std::uint64_t seed,
                                  std::uint64_t tag, const PickandsOptions& opt) {
  const ChiGrid g = make_chi_grid(T, grid_step, two_sided);
  std::vector<double> h1 = transition ? transition_drift(g, alpha, b_plus, b_minus) : std::vector<double>(g.size(), 0.0);
  std::vector<double> proposal;
  if (transition && opt.estimator == Estimator::shift && g.size() > 1) {
    const std::size_t n_pilot = std::clamp<std::size_t>(n_paths / 20, 256, 4096);
    proposal = pilot_proposal(alpha, g, h1, n_pilot, seed, tag + (std::uint64_t{1} << 40));
  }
  const RunResult rr = run_constant(alpha, g, h1, proposal, n_paths, seed, tag, opt);
  return {T, rr.moments.mean(), g.size() == 1 ? 0.0 : rr.moments.std_error(), g.step, g.size() == 1 ? 0 : n_paths};
}

inline void refinement(PickandsEstimate& est, const HorizonPoint& coarse, double alpha, bool two_sided, double b_plus,
                       double b_minus, bool transition, std::size_t n_paths, std::uint64_t seed,
                       const PickandsOptions& opt) {
  if (!opt.refinement_check || coarse.T == 0.0) return;
  const std::size_t paths = std::max<std::size_t>(256, n_paths / 4);
  const HorizonPoint fine = horizon_point(alpha, coarse.T, 0.5 * coarse.grid_step, two_sided, b_plus, b_minus,
                                          transition, paths, seed, 9000, opt);
  est.refinement_delta = fine.value - coarse.value;
  est.refinement_std_error = std::hypot(fine.std_error, coarse.std_error);
  est.refinement_flagged = std::abs(est.refinement_delta) > 2.0 * est.refinement_std_error;
  if (est.refinement_flagged)
    est.notes.push_back("grid refinement changes the estimate by more than 2 standard errors");
}

}  // namespace detail

/// Paths of chi (pickands drift) or chi_1 (transition drift) on the grid of lps.
inline PathBatch sample_chi_paths(const LimitProcessSpec& lps, std::size_t n_paths, std::uint64_t seed) {
  detail::check_alpha(lps.alpha);
  if (n_paths < 1) throw SpecViolation("sample_chi_paths: n_paths must be >= 1");
  const detail::ChiGrid g = detail::make_chi_grid(lps.T, lps.grid_step, lps.two_sided);
  const std::size_t N = g.size();
  PathBatch batch;
  batch.rows = n_paths;
  batch.cols = N;
  batch.times.resize(N);
  for (std::size_t p = 0; p < N; ++p) batch.times[p] = g.time(p);
  batch.values.assign(n_paths * N, 0.0);
  if (lps.drift == DriftKind::degenerate || N == 1) return batch;

  const std::size_t incr = lps.two_sided ? 2 * g.n : g.n;
  const GaussianSampler sampler = detail::increment_sampler(lps.alpha, g.step, incr);
  std::vector<double> h1(N, 0.0);
  if (lps.drift == DriftKind::transition) h1 = detail::transition_drift(g, lps.alpha, lps.b_plus, lps.b_minus);
  auto ws = sampler.workspace();
  std::vector<double> a(incr), b(incr), y(incr + 1);
  for (std::size_t r = 0; r < n_paths; r += 2) {
    Rng rng = make_stream(seed, r / 2, 1);
    sampler.sample_pair(rng, ws, a, b);
    for (int half = 0; half < 2 && r + half < n_paths; ++half) {
      const auto& e = half ? b : a;
      if (lps.two_sided) {
        detail::pinned_from_increments(e, y);
      } else {
        y[0] = 0.0;
        for (std::size_t k = 0; k < incr; ++k) y[k + 1] = y[k] + e[k];
      }
      double* out = batch.values.data() + (r + half) * N;
      for (std::size_t p = 0; p < N; ++p) {
        const double t = batch.times[p];
        double v = t == 0.0 ? 0.0 : y[p] - std::pow(std::abs(t), lps.alpha);
        if (lps.drift == DriftKind::transition) v -= h1[p];
        out[p] = v;
      }
    }
  }
  return batch;
}

/// Estimate of H_alpha(T) = E exp(max over the grid on [0, T] of chi).
inline PickandsEstimate estimate_H_alpha_T(double alpha, double T, double grid_step, std::size_t n_paths,
                                           std::uint64_t seed, const PickandsOptions& opt = {}) {
  detail::check_alpha(alpha);
  if (n_paths < 2) throw SpecViolation("estimate_H_alpha_T: n_paths must be >= 2");
  PickandsEstimate est;
  est.kind = ConstantKind::H_alpha_T;
  est.alpha = alpha;
  est.seed = seed;
  est.estimator = opt.estimator;
  est.T_schedule = {T};
  const auto pt = detail::horizon_point(alpha, T, grid_step, false, 0, 0, false, n_paths, seed, 1, opt);
  est.per_T = {pt};
  est.value = pt.value;
  est.std_error = pt.std_error;
  est.paths = pt.paths;
  est.grid_step = pt.grid_step;
  detail::refinement(est, pt, alpha, false, 0, 0, false, n_paths, seed, opt);
  return est;
}

/// H_alpha as the intercept of the weighted fit H(T)/T = H + c/T.
inline PickandsEstimate estimate_H_alpha(double alpha, const std::vector<double>& T_schedule, double grid_step,
                                         std::size_t n_paths, std::uint64_t seed, const PickandsOptions& opt = {}) {
  detail::check_alpha(alpha);
  if (T_schedule.size() < 3) throw SpecViolation("estimate_H_alpha: T_schedule needs at least 3 entries");
  for (std::size_t i = 0; i < T_schedule.size(); ++i)
    if (!(T_schedule[i] > 0.0) || (i && !(T_schedule[i] > T_schedule[i - 1])))
      throw SpecViolation("estimate_H_alpha: T_schedule must be positive and increasing");
  PickandsEstimate est;
  est.kind = ConstantKind::H_alpha;
  est.alpha = alpha;
  est.seed = seed;
  est.estimator = opt.estimator;
  est.T_schedule = T_schedule;
  est.grid_step = grid_step;
  for (std::size_t i = 0; i < T_schedule.size(); ++i) {
    est.per_T.push_back(
        detail::horizon_point(alpha, T_schedule[i], grid_step, false, 0, 0, false, n_paths, seed, 1 + i, opt));
    est.paths += est.per_T.back().paths;
  }
  // weighted least squares of y = H(T)/T on x = 1/T
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> x, y, w;
  for (const auto& p : est.per_T) {
    const double se = std::max(p.std_error / p.T, 1e-12 * p.value / p.T);
    x.push_back(1.0 / p.T);
    y.push_back(p.value / p.T);
    w.push_back(1.0 / (se * se));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i], sx += w[i] * x[i], sy += w[i] * y[i], sxx += w[i] * x[i] * x[i], sxy += w[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  est.fit_slope = (sw * sxy - sx * sy) / det;
  est.value = (sy - est.fit_slope * sx) / sw;
  est.std_error = std::sqrt(sxx / det);
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    est.fit_residuals.push_back(y[i] - (est.value + est.fit_slope * x[i]));
    min_ratio = std::min(min_ratio, y[i]);
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double se = std::hypot(est.per_T[i].std_error / est.per_T[i].T, est.per_T[i - 1].std_error / est.per_T[i - 1].T);
    if (y[i] > y[i - 1] + 3.0 * se) {
      est.extrapolation_warning = true;
      est.notes.push_back("H(T)/T increases along the schedule beyond noise");
    }
  }
  if (!(est.value > 0.0) || est.value > min_ratio + 3.0 * est.std_error) {
    est.extrapolation_warning = true;
    est.notes.push_back("extrapolated value violates 0 < H <= min H(T)/T + 3 se");
  }
  detail::refinement(est, est.per_T.back(), alpha, false, 0, 0, false, n_paths / T_schedule.size(), seed, opt);
  return est;
}

namespace detail {

inline void check_b(double b, const char* name) {
  if (!(b > 0.0)) throw SpecViolation(std::string(name) + " must be positive (or infinite)");
}

// Normalizes (b+, b-, domain) to a simulated configuration.
struct PConfig {
  bool degenerate = false;
  bool two_sided = false;
  double b_plus = 0.0;
  double b_minus = 0.0;
};

inline PConfig p_config(double b_plus, double b_minus, Domain domain) {
  check_b(b_plus, "b_plus");
  check_b(b_minus, "b_minus");
  PConfig c;
  const bool fp = std::isfinite(b_plus), fm = std::isfinite(b_minus);
  switch (domain) {
    case Domain::plus: c.degenerate = !fp, c.b_plus = b_plus; break;
    case Domain::minus: c.degenerate = !fm, c.b_plus = b_minus; break;  // mirror image
    case Domain::both:
      if (!fp && !fm) c.degenerate = true;
      else if (fp && fm) c.two_sided = true, c.b_plus = b_plus, c.b_minus = b_minus;
      else c.b_plus = fp ? b_plus : b_minus;
      break;
  }
  return c;
}

}  // namespace detail

/// P_alpha^+(T) (domain plus/minus) or P_alpha(T) (domain both).
inline PickandsEstimate estimate_P_alpha_T(double alpha, double b_plus, double b_minus, double T, Domain domain,
                                           double grid_step, std::size_t n_paths, std::uint64_t seed,
                                           const PickandsOptions& opt = {}) {
  detail::check_alpha(alpha);
  const auto cfg = detail::p_config(b_plus, b_minus, domain);
  PickandsEstimate est;
  est.kind = domain == Domain::both ? ConstantKind::P_alpha_T : ConstantKind::P_alpha_plus_T;
  est.alpha = alpha;
  est.b_plus = b_plus;
  est.b_minus = b_minus;
  est.seed = seed;
  est.estimator = opt.estimator;
  est.T_schedule = {T};
  est.grid_step = grid_step;
  if (cfg.degenerate) {
    est.value = 1.0;
    est.provenance = Provenance::closed_form;
    est.notes.push_back("infinite drift coefficient: degenerate limit, value 1");
    return est;
  }
  if (n_paths < 2) throw SpecViolation("estimate_P_alpha_T: n_paths must be >= 2");
  const auto pt = detail::horizon_point(alpha, T, grid_step, cfg.two_sided, cfg.b_plus,
                                        cfg.two_sided ? cfg.b_minus : std::numeric_limits<double>::infinity(), true,
                                        n_paths, seed, 1, opt);
  est.per_T = {pt};
  est.value = pt.value;
  est.std_error = pt.std_error;
  est.paths = pt.paths;
  est.grid_step = pt.grid_step;
  detail::refinement(est, pt, alpha, cfg.two_sided, cfg.b_plus,
                     cfg.two_sided ? cfg.b_minus : std::numeric_limits<double>::infinity(), true, n_paths, seed, opt);
  return est;
}

/// P_alpha^+ or P_alpha: value at the largest horizon, with the schedule as
/// a convergence diagnostic.
inline PickandsEstimate estimate_P_alpha(double alpha, double b_plus, double b_minus,
                                         const std::vector<double>& T_schedule, double grid_step, std::size_t n_paths,
                                         std::uint64_t seed, Domain domain = Domain::both,
                                         const PickandsOptions& opt = {}) {
  detail::check_alpha(alpha);
  const auto cfg = detail::p_config(b_plus, b_minus, domain);
  if (T_schedule.empty()) throw SpecViolation("estimate_P_alpha: empty T_schedule");
  for (std::size_t i = 1; i < T_schedule.size(); ++i)
    if (!(T_schedule[i] > T_schedule[i - 1])) throw SpecViolation("estimate_P_alpha: T_schedule must increase");
  PickandsEstimate est;
  est.kind = domain == Domain::both ? ConstantKind::P_alpha : ConstantKind::P_alpha_plus;
  est.alpha = alpha;
  est.b_plus = b_plus;
  est.b_minus = b_minus;
  est.seed = seed;
  est.estimator = opt.estimator;
  est.T_schedule = T_schedule;
  est.grid_step = grid_step;
  if (cfg.degenerate) {
    est.value = 1.0;
    est.provenance = Provenance::closed_form;
    est.notes.push_back("infinite drift coefficient: degenerate limit, value 1");
    return est;
  }
  const double bm = cfg.two_sided ? cfg.b_minus : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < T_schedule.size(); ++i) {
    est.per_T.push_back(detail::horizon_point(alpha, T_schedule[i], grid_step, cfg.two_sided, cfg.b_plus, bm, true,
                                              n_paths, seed, 1 + i, opt));
    est.paths += est.per_T.back().paths;
  }
  const auto& last = est.per_T.back();
  est.value = last.value;
  est.std_error = last.std_error;
  for (const auto& p : est.per_T) est.fit_residuals.push_back(p.value - last.value);
  if (est.per_T.size() >= 2) {
    const auto& prev = est.per_T[est.per_T.size() - 2];
    if (std::abs(last.value - prev.value) > 3.0 * std::hypot(last.std_error, prev.std_error)) {
      est.extrapolation_warning = true;
      est.notes.push_back("P(T) has not settled over the last two horizons");
    }
  }
  detail::refinement(est, last, alpha, cfg.two_sided, cfg.b_plus, bm, true, n_paths / T_schedule.size(), seed, opt);
  return est;
}

// ---------------------------------------------------------------------------
// Known values

inline std::optional<double> known_H_alpha(double alpha) {
  if (alpha == 1.0) return 1.0;
  if (alpha == 2.0) return 1.0 / std::sqrt(std::numbers::pi);
  return std::nullopt;
}

/// P_alpha^+ (plus/minus domain) or P_alpha (both) for alpha in {1, 2}.
inline std::optional<double> known_P_alpha(double alpha, double b_plus, double b_minus, Domain domain) {
  const auto cfg = detail::p_config(b_plus, b_minus, domain);
  if (cfg.degenerate) return 1.0;
  const double bp = cfg.b_plus;
  if (alpha == 1.0) {
    if (!cfg.two_sided) return 1.0 + 1.0 / bp;
    const double bm = cfg.b_minus;
    return 1.0 + 1.0 / bp + 1.0 / bm - 1.0 / (1.0 + bp + bm);
  }
  if (alpha == 2.0) {
    const double side_p = 0.5 * std::sqrt((1.0 + bp) / bp);
    if (!cfg.two_sided) return 0.5 + side_p;
    return side_p + 0.5 * std::sqrt((1.0 + cfg.b_minus) / cfg.b_minus);
  }
  return std::nullopt;
}

inline PickandsEstimate closed_form_estimate(ConstantKind kind, double alpha, double value,
                                             double b_plus = std::numeric_limits<double>::infinity(),
                                             double b_minus = std::numeric_limits<double>::infinity()) {
  PickandsEstimate est;
  est.kind = kind;
  est.alpha = alpha;
  est.value = value;
  est.b_plus = b_plus;
  est.b_minus = b_minus;
  est.provenance = Provenance::closed_form;
  return est;
}

}  // namespace gpx
