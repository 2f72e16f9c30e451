#pragma once

// Fixed-size work units executed by a small thread pool. Units are
// independent and results are merged by unit index, so output does not
// depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace gpx {

using Rng = std::mt19937_64;

/// Independent stream for (seed, unit, tag) via std::seed_seq.
inline Rng make_stream(std::uint64_t seed, std::uint64_t unit, std::uint64_t tag = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(unit), static_cast<std::uint32_t>(unit >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

/// Worker count: GE_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count(std::size_t units) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(units, 1)));
}

/// Runs body(workspace, unit) for unit in [0, n_units). Each worker owns one
/// workspace from make_workspace(). The first exception is rethrown.
template <class MakeWorkspace, class Body>
void run_units(std::size_t n_units, MakeWorkspace&& make_workspace, Body&& body) {
  const unsigned workers = worker_count(n_units);
  if (workers <= 1) {
    auto ws = make_workspace();
    for (std::size_t u = 0; u < n_units; ++u) body(ws, u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      auto ws = make_workspace();
      for (std::size_t u = next++; u < n_units; u = next++) body(ws, u);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next = n_units;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gpx
