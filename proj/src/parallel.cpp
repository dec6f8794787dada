#include "hypersketch/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hypersketch {

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_aligned(std::uint64_t begin, std::uint64_t end, std::uint64_t align,
                          int threads,
                          const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
  if (begin >= end) return;
  if (align == 0) align = 1;
  const std::uint64_t total = end - begin;
  if (threads < 1) threads = 1;

  // Aim for a handful of chunks per thread; round the chunk to the alignment.
  std::uint64_t chunk = std::max<std::uint64_t>(align, total / (8 * threads));
  chunk = (chunk + align - 1) / align * align;
  const std::uint64_t num_chunks = (total + chunk - 1) / chunk;

  if (threads == 1 || num_chunks == 1) {
    for (std::uint64_t c = 0; c < num_chunks; ++c) {
      const std::uint64_t lo = begin + c * chunk;
      fn(lo, std::min(end, lo + chunk));
    }
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
        if (c >= num_chunks) return;
        const std::uint64_t lo = begin + c * chunk;
        fn(lo, std::min(end, lo + chunk));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::uint64_t>(threads, num_chunks));
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace hypersketch
