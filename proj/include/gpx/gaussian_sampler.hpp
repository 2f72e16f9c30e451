#pragma once

// Exact Gaussian vector samplers: circulant embedding for stationary
// sequences (one FFT yields two independent vectors) and a dense Cholesky
// fallback.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include "gpx/audit.hpp"
#include "gpx/errors.hpp"
#include "gpx/fft.hpp"
#include "gpx/parallel.hpp"

namespace gpx {

enum class SamplerKind { circulant, dense };

/// Row-major batch of sampled paths on the grid `times`.
struct PathBatch {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> times;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
};

inline const char* to_string(SamplerKind k) { return k == SamplerKind::circulant ? "circulant" : "dense"; }

class CirculantEmbedding {
 public:
  /// autocov(k) = cov(Y_0, Y_k). Tries embedding sizes m, 2m, 4m, ... up to
  /// max_m; eigenvalues above -rel_tol * max are clipped to 0.
  static std::optional<CirculantEmbedding> build(const std::function<double(std::size_t)>& autocov, std::size_t n,
                                                 std::size_t max_m = std::size_t{1} << 22, double rel_tol = 1e-9) {
    if (n == 0) return std::nullopt;
    for (std::size_t m = next_fast_size(std::max<std::size_t>(2, 2 * (n - 1))); m <= max_m; m *= 2) {
      std::vector<double> c(m);
      try {
        for (std::size_t j = 0; j < m; ++j) c[j] = autocov(std::min(j, m - j));
      } catch (const RangeError&) {
        return std::nullopt;
      }
      FftPlan plan(m);
      for (std::size_t j = 0; j < m; ++j) plan.in()[j] = c[j];
      plan.execute();
      double top = 0.0, low = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        top = std::max(top, plan.out()[j].real());
        low = std::min(low, plan.out()[j].real());
      }
      if (!(top > 0.0) || low < -rel_tol * top) continue;
      CirculantEmbedding e;
      e.n_ = n;
      e.m_ = m;
      e.min_ratio_ = low / top;
      e.scale_.resize(m);
      for (std::size_t j = 0; j < m; ++j)
        e.scale_[j] = std::sqrt(std::max(0.0, plan.out()[j].real()) / static_cast<double>(m));
      return e;
    }
    return std::nullopt;
  }

  std::size_t points() const { return n_; }
  std::size_t embedding_size() const { return m_; }
  double min_eigen_ratio() const { return min_ratio_; }

  /// Two independent draws written to a and b (each of length points()).
  void sample_pair(Rng& rng, FftPlan& plan, std::span<double> a, std::span<double> b) const {
    boost::random::normal_distribution<double> normal;
    auto* in = plan.in();
    for (std::size_t j = 0; j < m_; ++j) {
      const double x = normal(rng);
      const double y = normal(rng);
      in[j] = std::complex<double>(scale_[j] * x, scale_[j] * y);
    }
    plan.execute();
    const auto* out = plan.out();
    for (std::size_t k = 0; k < n_; ++k) {
      a[k] = out[k].real();
      b[k] = out[k].imag();
    }
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  double min_ratio_ = 0.0;
  std::vector<double> scale_;
};

class DenseGaussian {
 public:
  explicit DenseGaussian(const Eigen::MatrixXd& cov) { jitter_ = factorize_with_jitter(cov, &L_); }

  std::size_t points() const { return static_cast<std::size_t>(L_.rows()); }
  double jitter() const { return jitter_; }

  void sample(Rng& rng, Eigen::VectorXd& z, std::span<double> out) const {
    boost::random::normal_distribution<double> normal;
    const auto n = L_.rows();
    z.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    Eigen::Map<Eigen::VectorXd>(out.data(), n).noalias() = L_.triangularView<Eigen::Lower>() * z;
  }

 private:
  Eigen::MatrixXd L_;
  double jitter_ = 0.0;
};

/// Per-worker scratch space.
struct SamplerWorkspace {
  std::optional<FftPlan> plan;
  Eigen::VectorXd z;
};

/// Stationary (or general, via dense) Gaussian vector sampler.
class GaussianSampler {
 public:
  static GaussianSampler stationary(const std::function<double(std::size_t)>& autocov, std::size_t n,
                                    std::size_t dense_limit = 4096) {
    GaussianSampler s;
    if (n <= 1) {
      s.dense_.emplace(Eigen::MatrixXd::Constant(1, 1, std::max(autocov(0), 0.0)));
      s.kind_ = SamplerKind::dense;
      return s;
    }
    s.circ_ = CirculantEmbedding::build(autocov, n);
    if (s.circ_) {
      s.kind_ = SamplerKind::circulant;
      return s;
    }
    if (n > dense_limit)
      throw SamplerError("circulant embedding failed and " + std::to_string(n) + " points exceed the dense limit");
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cov(i, j) = autocov(i > j ? i - j : j - i);
    s.dense_.emplace(make_dense(cov));
    s.kind_ = SamplerKind::dense;
    return s;
  }

  static GaussianSampler dense(const Eigen::MatrixXd& cov) {
    GaussianSampler s;
    s.dense_.emplace(make_dense(cov));
    s.kind_ = SamplerKind::dense;
    return s;
  }

  SamplerKind kind() const { return kind_; }
  std::size_t points() const { return circ_ ? circ_->points() : dense_->points(); }
  const std::optional<CirculantEmbedding>& embedding() const { return circ_; }

  SamplerWorkspace workspace() const {
    SamplerWorkspace ws;
    if (circ_) ws.plan.emplace(circ_->embedding_size());
    return ws;
  }

  void sample_pair(Rng& rng, SamplerWorkspace& ws, std::span<double> a, std::span<double> b) const {
    if (circ_) {
      circ_->sample_pair(rng, *ws.plan, a, b);
    } else {
      dense_->sample(rng, ws.z, a);
      dense_->sample(rng, ws.z, b);
    }
  }

 private:
  static DenseGaussian make_dense(const Eigen::MatrixXd& cov) {
    try {
      return DenseGaussian(cov);
    } catch (const NotPositiveDefinite& e) {
      throw SamplerError(std::string("dense factorization failed: ") + e.what());
    }
  }

  SamplerKind kind_ = SamplerKind::circulant;
  std::optional<CirculantEmbedding> circ_;
  std::optional<DenseGaussian> dense_;
};

}  // namespace gpx
