#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rifs {

/*
 * Deterministic parallel map: runs body(0..n-1) on `threads` workers pulling
 * indices from a shared counter.  Each body call must touch only state owned
 * by its index (its output slot, its substream seed), so results are identical
 * for any thread count and any interleaving.  threads <= 1 degrades to a plain
 * loop.  The first exception wins; remaining work is abandoned.
 */
inline void parallel_for(std::uint64_t n, unsigned threads,
                         const std::function<void(std::uint64_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  if (threads > n) threads = static_cast<unsigned>(n);

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rifs
