#ifndef COLEP_PARALLEL_HPP
#define COLEP_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace colep {

// COLEP_THREADS caps worker count; defaults to hardware concurrency.
inline int max_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("COLEP_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

// Runs fn(i) for i in [0, n). Each index is processed exactly once; callers
// must write only to per-index slots so results are independent of scheduling.
// The first worker exception is rethrown on the calling thread.
inline void parallel_for(long n, const std::function<void(long)>& fn) {
  int workers = std::min<long>(max_threads(), n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) return;
        long i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace colep

#endif
