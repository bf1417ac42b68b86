#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fpqmc {

/// Worker count used when the caller passes 0.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Calls fn(i) for every i in [0, count) on up to `workers` threads. Work is
/// handed out by an atomic counter; callers write results into slots indexed
/// by i so the outcome never depends on scheduling. The first exception is
/// rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fpqmc
