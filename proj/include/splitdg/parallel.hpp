#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace splitdg {

// Static-partition parallel loop. The partition depends only on (n, n_threads),
// and every index writes disjoint data, so results are identical for a fixed
// thread count.
inline void parallel_for(std::size_t n, int n_threads,
                         const std::function<void(std::size_t, int)>& body) {
  if (n == 0) return;
  if (n_threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i, 0);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t lo = n * t / nt;
    const std::size_t hi = n * (t + 1) / nt;
    workers.emplace_back([&body, lo, hi, t] {
      for (std::size_t i = lo; i < hi; ++i) body(i, static_cast<int>(t));
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace splitdg
