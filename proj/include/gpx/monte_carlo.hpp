#pragma once

// Crude Monte Carlo for P(max X(t) > u) with X(t) = sigma(t) X0(t), X0
// stationary with correlation rho. Per-path grid maxima are kept for every
// sub-domain and for the coarse (every other node) grid, so estimates across
// levels, domains and refinements share the same paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gpx/asymptotics.hpp"
#include "gpx/errors.hpp"
#include "gpx/gaussian_sampler.hpp"
#include "gpx/parallel.hpp"
#include "gpx/process_model.hpp"

namespace gpx {

inline std::size_t default_grid_points(double alpha) { return alpha >= 1.0 ? 4096 : 16384; }

/// Nodes of the simulated domain: grid_points cells, 0 always a node.
struct McGrid {
  Domain domain = Domain::both;
  std::size_t cells = 0;
  double step = 0.0;
  std::size_t zero = 0;
  std::vector<double> t;
};

inline McGrid mc_grid(const ProcessSpec& spec, Domain domain, std::size_t grid_points) {
  if (grid_points < 4 || grid_points % 2) throw SpecViolation("mc grid: grid_points must be even and >= 4");
  if (domain == Domain::both && grid_points % 4)
    throw SpecViolation("mc grid: grid_points must be a multiple of 4 on [-S, S]");
  McGrid g;
  g.domain = domain;
  g.cells = grid_points;
  const double len = domain == Domain::both ? 2.0 * spec.S : spec.S;
  const double start = domain == Domain::plus ? 0.0 : -spec.S;
  g.step = len / static_cast<double>(grid_points);
  g.t.resize(grid_points + 1);
  for (std::size_t k = 0; k <= grid_points; ++k) g.t[k] = start + len * static_cast<double>(k) / grid_points;
  g.zero = domain == Domain::both ? grid_points / 2 : (domain == Domain::plus ? 0 : grid_points);
  g.t[g.zero] = 0.0;
  g.t.back() = domain == Domain::minus ? 0.0 : spec.S;
  return g;
}

/// Sampler of X on an McGrid: circulant (or dense) X0 scaled by sigma.
class ProcessSampler {
 public:
  ProcessSampler(const ProcessSpec& spec, Domain domain, std::size_t grid_points)
      : grid_(mc_grid(spec, domain, grid_points)),
        base_(GaussianSampler::stationary(
            [&spec, h = grid_.step](std::size_t k) { return correlation_value(spec.correlation, h * k); },
            grid_.t.size())) {
    sigma_.resize(grid_.t.size());
    for (std::size_t k = 0; k < sigma_.size(); ++k) sigma_[k] = std::sqrt(eval_variance(spec, grid_.t[k]));
  }

  const McGrid& grid() const { return grid_; }
  SamplerKind kind() const { return base_.kind(); }
  SamplerWorkspace workspace() const { return base_.workspace(); }

  void sample_pair(Rng& rng, SamplerWorkspace& ws, std::span<double> a, std::span<double> b) const {
    base_.sample_pair(rng, ws, a, b);
    for (std::size_t k = 0; k < sigma_.size(); ++k) {
      a[k] *= sigma_[k];
      b[k] *= sigma_[k];
    }
  }

 private:
  McGrid grid_;
  GaussianSampler base_;
  std::vector<double> sigma_;
};

/// Streams n_batches batches of batch_size paths to sink(batch_index, batch).
inline void sample_paths(const ProcessSpec& spec, Domain domain, std::size_t grid_points, std::size_t n_batches,
                         std::size_t batch_size, std::uint64_t seed,
                         const std::function<void(std::size_t, const PathBatch&)>& sink) {
  const ProcessSampler sampler(spec, domain, grid_points);
  const std::size_t n = sampler.grid().t.size();
  auto ws = sampler.workspace();
  std::vector<double> a(n), b(n);
  PathBatch batch;
  batch.cols = n;
  batch.times = sampler.grid().t;
  for (std::size_t i = 0; i < n_batches; ++i) {
    Rng rng = make_stream(seed, i, 7);
    batch.rows = batch_size;
    batch.values.assign(batch_size * n, 0.0);
    for (std::size_t r = 0; r < batch_size; r += 2) {
      sampler.sample_pair(rng, ws, a, b);
      std::copy(a.begin(), a.end(), batch.values.begin() + static_cast<std::ptrdiff_t>(r * n));
      if (r + 1 < batch_size) std::copy(b.begin(), b.end(), batch.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
    }
    sink(i, batch);
  }
}

inline std::size_t domain_index(Domain d) { return static_cast<std::size_t>(d); }

/// Per-path grid maxima on the fine grid and on the coarse grid (even nodes),
/// for the simulated domain and, when it is [-S, S], for both halves.
struct MaximaTable {
  Domain domain = Domain::both;
  std::size_t n_paths = 0;
  std::size_t grid_points = 0;
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::circulant;
  std::array<std::vector<double>, 3> fine;
  std::array<std::vector<double>, 3> coarse;

  bool has(Domain d) const { return !fine[domain_index(d)].empty(); }
};

inline MaximaTable simulate_maxima(const ProcessSpec& spec, Domain domain, std::size_t grid_points,
                                   std::size_t n_paths, std::uint64_t seed, std::size_t unit_paths = 1024) {
  if (n_paths < 1) throw SpecViolation("mc: n_paths must be >= 1");
  const ProcessSampler sampler(spec, domain, grid_points);
  const McGrid& g = sampler.grid();
  MaximaTable tab;
  tab.domain = domain;
  tab.n_paths = n_paths;
  tab.grid_points = grid_points;
  tab.seed = seed;
  tab.sampler = sampler.kind();
  std::vector<Domain> subs{domain};
  if (domain == Domain::both) subs = {Domain::both, Domain::plus, Domain::minus};
  for (Domain d : subs) {
    tab.fine[domain_index(d)].assign(n_paths, 0.0);
    tab.coarse[domain_index(d)].assign(n_paths, 0.0);
  }
  const std::size_t n = g.t.size();
  const std::size_t unit = std::max<std::size_t>(2, unit_paths + (unit_paths & 1));
  const std::size_t n_units = (n_paths + unit - 1) / unit;
  struct Ws {
    SamplerWorkspace sw;
    std::vector<double> a, b;
  };
  run_units(
      n_units, [&] { return Ws{sampler.workspace(), std::vector<double>(n), std::vector<double>(n)}; },
      [&](Ws& ws, std::size_t u) {
        Rng rng = make_stream(seed, u, 3);
        const std::size_t begin = u * unit, end = std::min(n_paths, begin + unit);
        for (std::size_t p = begin; p < end; p += 2) {
          sampler.sample_pair(rng, ws.sw, ws.a, ws.b);
          for (int half = 0; half < 2 && p + half < end; ++half) {
            const auto& x = half ? ws.b : ws.a;
            const std::size_t row = p + half;
            // maxima over [0, zero] and [zero, n-1], fine and even nodes
            constexpr double ninf = -std::numeric_limits<double>::infinity();
            double lf = ninf, lc = ninf, rf = ninf, rc = ninf;
            for (std::size_t k = 0; k <= g.zero; ++k) {
              lf = std::max(lf, x[k]);
              if (k % 2 == 0) lc = std::max(lc, x[k]);
            }
            for (std::size_t k = g.zero; k < n; ++k) {
              rf = std::max(rf, x[k]);
              if (k % 2 == 0) rc = std::max(rc, x[k]);
            }
            auto put = [&](Domain d, double f, double c) {
              tab.fine[domain_index(d)][row] = f;
              tab.coarse[domain_index(d)][row] = c;
            };
            switch (domain) {
              case Domain::both:
                put(Domain::both, std::max(lf, rf), std::max(lc, rc));
                put(Domain::plus, rf, rc);
                put(Domain::minus, lf, lc);
                break;
              case Domain::plus: put(Domain::plus, rf, rc); break;
              case Domain::minus: put(Domain::minus, lf, lc); break;
            }
          }
        }
      });
  return tab;
}

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Two-sided 95% Wilson interval; with zero hits the upper end is the
/// one-sided 95% Wilson bound.
inline WilsonInterval wilson_interval(std::size_t hits, std::size_t n) {
  const double N = static_cast<double>(n);
  if (hits == 0) {
    constexpr double z1 = 1.6448536269514722;
    return {0.0, z1 * z1 / (N + z1 * z1)};
  }
  constexpr double z = 1.959963984540054;
  const double p = static_cast<double>(hits) / N;
  const double denom = 1.0 + z * z / N;
  const double centre = (p + z * z / (2.0 * N)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / N + z * z / (4.0 * N * N));
  return {std::clamp(std::min(centre - half, p), 0.0, 1.0), std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

struct MCEstimate {
  double u = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t hits = 0;
  std::size_t n_paths = 0;
  std::size_t grid_points = 0;
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::circulant;
  Domain domain = Domain::both;
  double p_hat_coarse = 0.0;      // same paths, grid_points / 2 cells
  double refinement_delta = 0.0;  // p_hat - p_hat_coarse >= 0
  std::vector<std::string> warnings;
};

inline MCEstimate exceedance_from_maxima(const MaximaTable& tab, double u, Domain domain) {
  if (!tab.has(domain)) throw SpecViolation(std::string("mc: domain ") + to_string(domain) + " was not simulated");
  const auto& fine = tab.fine[domain_index(domain)];
  const auto& coarse = tab.coarse[domain_index(domain)];
  std::size_t hits = 0, hits_coarse = 0;
  for (std::size_t i = 0; i < tab.n_paths; ++i) {
    hits += fine[i] > u;
    hits_coarse += coarse[i] > u;
  }
  MCEstimate e;
  e.u = u;
  e.hits = hits;
  e.n_paths = tab.n_paths;
  e.grid_points = tab.grid_points;
  e.seed = tab.seed;
  e.sampler = tab.sampler;
  e.domain = domain;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(tab.n_paths);
  e.p_hat_coarse = static_cast<double>(hits_coarse) / static_cast<double>(tab.n_paths);
  e.refinement_delta = e.p_hat - e.p_hat_coarse;
  const auto ci = wilson_interval(hits, tab.n_paths);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  if (hits == 0) e.warnings.push_back("zero hits: one-sided interval, low power");
  else if (hits < 30) e.warnings.push_back("fewer than 30 hits: low power");
  return e;
}

/// P(max over the grid on the domain > u) with a Wilson 95% interval.
inline MCEstimate estimate_exceedance(const ProcessSpec& spec, double u, std::size_t grid_points, std::size_t n_paths,
                                      std::uint64_t seed, Domain domain = Domain::both) {
  return exceedance_from_maxima(simulate_maxima(spec, domain, grid_points, n_paths, seed), u, domain);
}

/// Coupled estimates for a u schedule (same paths for every level).
inline std::vector<MCEstimate> estimate_exceedance_schedule(const ProcessSpec& spec, const std::vector<double>& us,
                                                            std::size_t grid_points, std::size_t n_paths,
                                                            std::uint64_t seed, Domain domain = Domain::both) {
  const auto tab = simulate_maxima(spec, domain, grid_points, n_paths, seed);
  std::vector<MCEstimate> out;
  for (double u : us) out.push_back(exceedance_from_maxima(tab, u, domain));
  return out;
}

struct McParams {
  std::size_t n_paths = 100000;
  std::size_t grid_points = 0;  // 0 selects default_grid_points(alpha)
  std::uint64_t seed = 1;
  Domain domain = Domain::both;
};

struct ValidationRow {
  MCEstimate mc;
  AsymptoticResult asymptotic;
  double ratio = 0.0;
};

struct ValidationTable {
  std::vector<ValidationRow> rows;
  bool trend_toward_one = false;   // |ratio - 1| non-increasing along the schedule
  bool net_toward_one = false;     // |ratio - 1| at the last u <= at the first u
  std::vector<std::string> notes;
};

inline ValidationTable validate(const ProcessSpec& spec, const std::vector<double>& u_schedule,
                                const ConstantsBundle& constants, const McParams& mc,
                                const AsymptoticOptions& opt = {}) {
  if (u_schedule.empty()) throw SpecViolation("validate: empty u schedule");
  const std::size_t grid = mc.grid_points ? mc.grid_points : default_grid_points(spec.alpha());
  ValidationTable tab;
  const auto est = estimate_exceedance_schedule(spec, u_schedule, grid, mc.n_paths, mc.seed, mc.domain);
  for (std::size_t i = 0; i < u_schedule.size(); ++i) {
    ValidationRow row;
    row.mc = est[i];
    row.asymptotic = evaluate(spec, u_schedule[i], constants, mc.domain, opt);
    row.ratio = row.asymptotic.value > 0.0 ? row.mc.p_hat / row.asymptotic.value
                                           : std::numeric_limits<double>::infinity();
    tab.rows.push_back(std::move(row));
  }
  tab.trend_toward_one = true;
  for (std::size_t i = 1; i < tab.rows.size(); ++i)
    if (std::abs(tab.rows[i].ratio - 1.0) > std::abs(tab.rows[i - 1].ratio - 1.0)) tab.trend_toward_one = false;
  tab.net_toward_one = std::abs(tab.rows.back().ratio - 1.0) <= std::abs(tab.rows.front().ratio - 1.0);
  for (const auto& r : tab.rows)
    for (const auto& w : r.mc.warnings) tab.notes.push_back("u = " + std::to_string(r.mc.u) + ": " + w);
  return tab;
}

}  // namespace gpx
