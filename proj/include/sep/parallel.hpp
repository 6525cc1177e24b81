#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace sep {

// Worker cap: SEP_THREADS env var if set, else hardware concurrency.
inline unsigned worker_count(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("SEP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = static_cast<unsigned>(std::min<long>(v, 1024));
  }
  return static_cast<unsigned>(std::min<std::size_t>(hw, jobs));
}

// Runs f(i) for i in [0, jobs); each job owns its output slot, so scheduling
// cannot change results.
template <typename F>
void parallel_for(std::size_t jobs, F&& f) {
  if (jobs == 0) return;
  const unsigned workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs) return;
        f(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sep
