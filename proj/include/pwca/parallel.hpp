#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace pwca::detail {

// Worker budget: PWCA_THREADS caps it, 0 or unset means auto.
inline unsigned thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PWCA_THREADS")) {
    const long v = std::atol(env);
    if (v > 0) return std::min<unsigned>(static_cast<unsigned>(v), hw == 0 ? 1 : 64u);
  }
  return std::min(hw, 16u);
}

// Index-parallel loop. Each index writes only its own outputs, so the result
// is identical to the sequential loop for any thread count.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned nt = std::min<std::size_t>(thread_count(), n == 0 ? 1 : n);
  if (nt <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nt);
  const std::size_t chunk = (n + nt - 1) / nt;
  for (unsigned t = 0; t < nt; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& w : workers) w.join();
}

} // namespace pwca::detail
