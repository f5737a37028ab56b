#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace homog {

/// Default worker count: HOMOG_THREADS if set, else the hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("HOMOG_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{default_thread_count()};
  return n;
}

inline void set_thread_count(int n) { thread_setting() = std::max(1, n); }
inline int thread_count() { return thread_setting().load(); }

/// Runs body(i) for i in [0, count) on up to thread_count() workers.
/// Results are written by index, so the outcome does not depend on scheduling.
/// The first exception (by index) is rethrown after all workers join.
inline void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace homog
