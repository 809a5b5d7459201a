#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ffspectra {

namespace detail {
inline std::atomic<unsigned>& thread_override() {
  static std::atomic<unsigned> value{0};
  return value;
}
}  // namespace detail

/// Caps the worker count for all sweeps; 0 restores the default.
inline void set_thread_count(unsigned n) { detail::thread_override().store(n); }

/// Explicit setting, else FFSPECTRA_THREADS, else hardware concurrency.
inline unsigned thread_count() {
  if (unsigned n = detail::thread_override().load(); n > 0) return n;
  if (const char* env = std::getenv("FFSPECTRA_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [begin, end). Indices are dealt out in blocks; fn must
/// only write to state owned by index i. The first exception is rethrown.
template <class Fn>
void parallel_for(std::uint64_t begin, std::uint64_t end, Fn&& fn) {
  if (end <= begin) return;
  const std::uint64_t total = end - begin;
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(thread_count(), total));
  if (workers <= 1) {
    for (std::uint64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{begin};
  const std::uint64_t block = std::max<std::uint64_t>(1, total / (std::uint64_t{workers} * 8));
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    try {
      for (;;) {
        const std::uint64_t start = next.fetch_add(block);
        if (start >= end) break;
        const std::uint64_t stop = std::min(end, start + block);
        for (std::uint64_t i = start; i < stop; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(end);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ffspectra
