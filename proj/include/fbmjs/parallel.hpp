#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace fbmjs {

/// Monte Carlo loops run either on one thread in index order (the reference
/// used by tests) or on an OpenMP team. Results never depend on the choice:
/// every replicate writes to its own slot and reductions run sequentially.
enum class ExecPolicy { serial, parallel };

/// OpenMP's thread count, capped by the FBM_THREADS environment variable
/// when set. Throws std::invalid_argument if FBM_THREADS is not a positive
/// integer.
int worker_threads();

/// Calls body(state, k) for k = 0..count-1, where state comes from
/// make_state() once per worker thread. The first exception thrown by any
/// body is rethrown on the calling thread after the loop.
template <class MakeState, class Body>
void for_each_replicate(std::size_t count, ExecPolicy policy, MakeState&& make_state, Body&& body) {
  if (policy == ExecPolicy::serial || count < 2) {
    auto state = make_state();
    for (std::size_t k = 0; k < count; ++k) body(state, k);
    return;
  }
  const int threads = worker_threads();
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<bool> failed{false};
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel num_threads(threads)
  {
    try {
      auto state = make_state();
#pragma omp for schedule(dynamic, 16)
      for (std::int64_t k = 0; k < n; ++k) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
          body(state, static_cast<std::size_t>(k));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace fbmjs
