#pragma once
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

// Deterministic map-style parallelism: every kernel writes slot i from input i
// only, then the caller reduces in index order, so Serial and Parallel modes
// produce bit-identical results regardless of thread count.  A single loop
// body instantiation serves both modes (Serial pins the team to one thread);
// two separate loops would let the optimizer contract floating point
// differently in each and break the bitwise guarantee.

namespace dforge {

enum class Exec { Serial, Parallel };

// Process-wide default used by kernels that don't take an explicit mode.
Exec& default_exec();

template <class F>
void for_index(Exec mode, std::size_t n, F&& body) {
#ifdef _OPENMP
  const int threads = mode == Exec::Parallel ? omp_get_max_threads() : 1;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(n); ++i) body(static_cast<std::size_t>(i));
#else
  (void)mode;
  for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace dforge
