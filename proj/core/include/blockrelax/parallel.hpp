#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace blockrelax {

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Work items are
/// claimed from a shared counter; callers write results into slot i so the
/// outcome never depends on scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::uint64_t count, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::uint64_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t t = 0; t < std::min(workers, count); ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::uint64_t i = next.fetch_add(1);
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
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace blockrelax
