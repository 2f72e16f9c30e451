#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace gpx {

namespace detail {
// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Forward complex DFT of fixed size with owned, aligned buffers.
class FftPlan {
 public:
  FftPlan() = default;
  explicit FftPlan(std::size_t n) : n_(n) {
    in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!in_ || !out_) {
      release();
      throw std::bad_alloc();
    }
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& o) noexcept { swap(o); }
  FftPlan& operator=(FftPlan&& o) noexcept {
    if (this != &o) {
      release();
      swap(o);
    }
    return *this;
  }
  ~FftPlan() { release(); }

  std::size_t size() const { return n_; }
  std::complex<double>* in() { return reinterpret_cast<std::complex<double>*>(in_); }
  const std::complex<double>* out() const { return reinterpret_cast<const std::complex<double>*>(out_); }
  void execute() { fftw_execute(plan_); }

 private:
  void swap(FftPlan& o) noexcept {
    std::swap(n_, o.n_);
    std::swap(in_, o.in_);
    std::swap(out_, o.out_);
    std::swap(plan_, o.plan_);
  }
  void release() {
    if (plan_) {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    if (in_) fftw_free(in_);
    if (out_) fftw_free(out_);
    plan_ = nullptr;
    in_ = out_ = nullptr;
    n_ = 0;
  }

  std::size_t n_ = 0;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

/// Smallest even m >= n whose prime factors are in {2, 3, 5}.
inline std::size_t next_fast_size(std::size_t n) {
  if (n < 2) return 2;
  for (std::size_t m = n + (n & 1);; m += 2) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace gpx
