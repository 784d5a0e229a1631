#pragma once

// Data-parallel loop primitive shared by every per-particle kernel.
//
// Each index owns its RNG stream (derived from the index), so a kernel's
// output is bit-identical under Execution::serial and Execution::parallel and
// for any OpenMP thread count. Reductions are performed afterwards, in index
// order, by the caller.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smc {

enum class Execution { serial, parallel };

inline int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Calls fn(i) for i in [0, n). If any call throws, the exception raised at
/// the smallest index is rethrown after the loop completes.
template <class Fn>
void for_each_index(Execution ex, std::size_t n, Fn&& fn) {
  if (ex == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(smc_for_each_index_error)
      {
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace smc
