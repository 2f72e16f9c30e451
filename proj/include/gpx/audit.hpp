#pragma once

// Numerical audit of the standing assumptions on a process specification.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "gpx/errors.hpp"
#include "gpx/process_model.hpp"
#include "gpx/regvar.hpp"

namespace gpx {

struct AuditCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  std::size_t grid_size = 0;
  double jitter_used = 0.0;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const AuditCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Cholesky of cov + jitter*I with jitter stepping 1e-12 .. 1e-8 (relative to
/// the largest diagonal entry). Returns the jitter used or throws.
inline double factorize_with_jitter(const Eigen::MatrixXd& cov, Eigen::MatrixXd* lower = nullptr) {
  const double scale = std::max(cov.diagonal().maxCoeff(), 1e-300);
  for (double jitter : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
    Eigen::MatrixXd m = cov;
    m.diagonal().array() += jitter * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      if (lower) *lower = llt.matrixL();
      return jitter;
    }
  }
  throw NotPositiveDefinite("covariance factorization failed after maximal jitter 1e-8");
}

/// Dyadic grid t_k = -S + 2 S k / n, k = 0..n.
inline std::vector<double> audit_grid(double S, std::size_t n) {
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = -S + 2.0 * S * static_cast<double>(k) / static_cast<double>(n);
  t[n / 2] = (n % 2 == 0) ? 0.0 : t[n / 2];
  return t;
}

inline AuditReport audit_assumptions(const ProcessSpec& spec, std::size_t grid_size = 256) {
  if (grid_size < 16) throw SpecViolation("audit_assumptions: grid_size must be >= 16");
  AuditReport rep;
  rep.grid_size = grid_size;
  const auto t = audit_grid(spec.S, grid_size);

  {
    AuditCheck c{"variance_unique_max", true, 0.0, ""};
    double worst = 0.0;
    for (double s : t) {
      const double v = eval_variance(spec, s);
      if (s == 0.0) {
        if (v != 1.0) c.passed = false, c.detail = "sigma^2(0) != 1";
      } else if (!(v < 1.0)) {
        c.passed = spec.stationary();
        c.detail = spec.stationary() ? "constant variance (stationary)" : "sigma^2(t) = 1 at t = " + std::to_string(s);
      }
      if (s != 0.0) worst = std::max(worst, v);
    }
    c.measured = worst;
    rep.checks.push_back(c);
  }

  {
    AuditCheck c{"correlation_below_one", true, 0.0, ""};
    double worst = -1.0;
    for (std::size_t k = 1; k <= grid_size; ++k) {
      const double lag = 2.0 * spec.S * static_cast<double>(k) / static_cast<double>(grid_size);
      const double r = eval_correlation(spec, lag);
      worst = std::max(worst, r);
      if (!(r < 1.0) && c.passed) c.passed = false, c.detail = "rho = 1 at lag " + std::to_string(lag);
    }
    c.measured = worst;
    rep.checks.push_back(c);
  }

  {
    // u^2 (1 - rho(q(u) t)) / t^alpha over t in {1/2, 1, 2}.
    AuditCheck c{"local_scaling", true, 0.0, ""};
    const auto& corr = spec.correlation;
    double prev = std::numeric_limits<double>::infinity();
    int used = 0;
    for (double u : {1e1, 1e2, 1e3, 1e4}) {
      double q = 0.0;
      try {
        q = q_of_u(corr, u);
      } catch (const NumericalFailure&) {
        continue;
      }
      if (corr.form == CorrelationForm::tabulated && 0.5 * q < corr.table.xs()[1]) continue;
      double dev = 0.0;
      for (double s : {0.5, 1.0, 2.0}) {
        const double ratio = u * u * correlation_deficit(corr, q * s) / std::pow(s, corr.alpha);
        dev = std::max(dev, std::abs(ratio - 1.0));
      }
      if (dev > prev + 1e-9) c.passed = false, c.detail = "scaling deviation increases along the u schedule";
      prev = dev;
      ++used;
    }
    if (used == 0) {
      c.passed = false;
      c.detail = "no resolvable u in the schedule";
    } else {
      c.measured = prev;
      if (prev > 0.1) c.passed = false, c.detail = "scaling deviation at the largest u exceeds 0.1";
    }
    rep.checks.push_back(c);
  }

  {
    AuditCheck c{"covariance_psd", true, 0.0, ""};
    const std::size_t n = t.size();
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) cov(i, j) = cov(j, i) = eval_covariance(spec, t[i], t[j]);
    rep.jitter_used = factorize_with_jitter(cov);
    c.measured = rep.jitter_used;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace gpx
