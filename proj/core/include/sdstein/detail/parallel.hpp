#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace sdstein::detail {

/// Worker cap: SDSTEIN_THREADS when set, hardware concurrency otherwise.
inline int worker_cap() {
  if (const char* env = std::getenv("SDSTEIN_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs task(0..count-1) on a bounded pool. Each task must write only its own
/// output slot; results are then independent of the worker count.
inline void run_indexed_tasks(int count, const std::function<void(int)>& task) {
  const int workers = std::max(1, std::min(worker_cap(), count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sdstein::detail
