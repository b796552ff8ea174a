#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ghost {

/// Worker count for pixel-parallel evaluation; 0 picks the hardware
/// concurrency. Results never depend on this value: work is split into
/// tasks whose boundaries are fixed by the problem size alone.
struct Execution {
  unsigned workers = 0;

  unsigned resolved() const {
    if (workers != 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// Runs task(i) for i in [0, n). Tasks must write to disjoint outputs. The
/// first exception thrown by any task is rethrown on the calling thread.
template <typename Task>
void parallel_for(std::size_t n, Execution exec, Task&& task) {
  const std::size_t workers = std::min<std::size_t>(exec.resolved(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace ghost
