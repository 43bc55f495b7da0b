#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace clusterlab {

/// Thrown when an enumeration guard would be exceeded.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CLUSTERLAB_GUARD_OVERRIDE=1 lifts enumeration guards.
inline bool guard_override_enabled() {
  const char* v = std::getenv("CLUSTERLAB_GUARD_OVERRIDE");
  return v != nullptr && std::string(v) == "1";
}

inline void check_guard(bool within, const std::string& what) {
  if (!within && !guard_override_enabled()) {
    throw GuardExceeded(what + " (set CLUSTERLAB_GUARD_OVERRIDE=1 to lift)");
  }
}

inline unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(task, worker) for task in [0, tasks) on `workers` threads. Tasks are
/// claimed dynamically, so fn must write results keyed by task (never by
/// arrival order) for the output to be independent of the worker count.
template <class Fn>
void parallel_tasks(std::size_t tasks, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(tasks, 1))));
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) fn(t, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = next++; t < tasks; t = next++) fn(t, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = tasks;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace clusterlab
