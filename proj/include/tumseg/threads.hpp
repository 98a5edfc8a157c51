#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace tumseg {

/// Worker-thread cap: TUMSEG_THREADS if set, else hardware concurrency.
inline int worker_threads() {
  if (const char *env = std::getenv("TUMSEG_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1)
      return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
/// worker; results must be written to disjoint slots so the schedule cannot
/// change outcomes. Runs inline when a single worker suffices.
inline void parallel_for(int n, const std::function<void(int)> &fn) {
  const int threads = std::min(worker_threads(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi)
      break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i)
        fn(i);
    });
  }
  for (auto &th : pool)
    th.join();
}

} // namespace tumseg
