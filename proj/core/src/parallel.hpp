#pragma once

#include <exception>
#include <mutex>

#include "ppife/geometry.hpp"

namespace ppife::detail {

// Parallel loop over [0, n) that rethrows the first exception raised by fn.
template <class Fn>
void parallel_for(Index n, Fn&& fn) {
  std::exception_ptr error;
  std::mutex mutex;
#pragma omp parallel for schedule(dynamic, 64)
  for (Index i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace ppife::detail
