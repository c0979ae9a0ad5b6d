#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nlps {

/// Worker count: NLPS_THREADS if set and positive, otherwise hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("NLPS_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

inline bool& inside_parallel_region() {
  thread_local bool inside = false;
  return inside;
}

/// Runs body(i) for i in [0, count). Work is pulled from a shared counter, so
/// results must be written to per-index slots; scheduling never affects output.
/// Nested calls run serially on the calling worker.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, unsigned threads = thread_count()) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1 || inside_parallel_region()) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      inside_parallel_region() = true;
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace nlps
