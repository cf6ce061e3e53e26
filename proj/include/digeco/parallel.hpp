#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace digeco {

// Worker count used by parallel_for_runs; 0 means the OpenMP default.
void set_worker_count(int workers);
int worker_count();

// Runs body(i) for i in [0,n) across OpenMP threads. Results must be written
// to slot i only, so the output never depends on scheduling. The first
// exception thrown by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for_runs(std::size_t n, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<std::int64_t>(n);
  const int workers = worker_count();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers != 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace digeco
