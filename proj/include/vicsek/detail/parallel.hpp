#pragma once
// Row-parallel loop with exception capture. Each index is processed by a pure,
// independent body, so the result is identical for any worker count; OpenMP is
// used only when more than one worker is requested.

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vicsek::detail {

template <class F>
inline void parallel_rows(std::size_t n, int workers, F&& body) {
#ifdef _OPENMP
  if (workers > 1 && n > 1) {
    std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)workers;
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace vicsek::detail
