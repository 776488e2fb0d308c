#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace infomech {

/// Worker count: INFOMECH_THREADS when set, hardware concurrency otherwise.
inline int worker_count() {
  if (const char* env = std::getenv("INFOMECH_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(first, last) over a partition of [0, count) on up to
/// worker_count() threads. Falls back to a single call for small jobs.
inline void parallel_chunks(std::size_t count, std::size_t min_per_worker,
                            const std::function<void(std::size_t, std::size_t, int)>& fn) {
  int workers = worker_count();
  std::size_t max_workers = std::max<std::size_t>(1, count / std::max<std::size_t>(1, min_per_worker));
  workers = static_cast<int>(std::min<std::size_t>(workers, max_workers));
  if (workers <= 1) {
    fn(0, count, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi, w);
  }
  for (auto& t : pool) t.join();
}

}  // namespace infomech
