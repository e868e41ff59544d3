#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace isk {

// Parallel map with a fixed-order reduce: fn(i) must be a pure function of i;
// results land in slot i regardless of worker count, so output bytes never
// depend on parallelism.
template <class Fn>
auto parallel_map(std::int64_t n_tasks, int workers, Fn&& fn)
    -> std::vector<decltype(fn(std::int64_t{}))> {
  using R = decltype(fn(std::int64_t{}));
  std::vector<R> results(static_cast<std::size_t>(n_tasks));
  if (n_tasks == 0) return results;
  if (workers < 1) workers = 1;
  if (workers == 1) {
    for (std::int64_t i = 0; i < n_tasks; ++i) results[i] = fn(i);
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::int64_t i = w; i < n_tasks; i += workers) results[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace isk
