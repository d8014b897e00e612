#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace panelur {

/// Worker count from PANELUR_WORKERS, else the hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls fn(i) for i in [0, count) on up to `workers` threads. Work items are
/// claimed dynamically, so fn must write its result into a slot addressed by i.
/// The first exception thrown by fn is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t spawned = workers < count ? workers : count;
    pool.reserve(spawned);
    for (std::size_t w = 0; w < spawned; ++w) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace panelur
