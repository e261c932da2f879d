#pragma once

#include <cstddef>

#ifdef KMSGF_HAVE_OPENMP
#include <omp.h>
#endif

namespace kmsgf {

/** Deterministic reductions.
 *
 * All sums in the library go through a fixed binary splitting tree: a range
 * [lo, hi) is split at its midpoint until blocks of at most pairwise_leaf
 * terms remain, and each block is accumulated left to right.  The tree shape
 * depends only on the index range, never on the thread count, so the serial
 * and OpenMP evaluations produce bit-identical results and repeated runs of
 * the same configuration reproduce byte-identical output.
 */

enum class Exec { serial, parallel };

inline Exec& execution_mode() {
#ifdef KMSGF_HAVE_OPENMP
  static Exec mode = Exec::parallel;
#else
  static Exec mode = Exec::serial;
#endif
  return mode;
}

inline void set_execution_mode(Exec e) { execution_mode() = e; }

inline constexpr std::size_t pairwise_leaf = 64;

// Parallel task spawning stops at this depth; below it each task runs the
// serial recursion, which follows the identical split points.
inline constexpr int pairwise_task_depth = 6;

// Ranges shorter than this are not worth a parallel region.
inline constexpr std::size_t pairwise_parallel_cutoff = 4096;

template <class T, class F>
T pairwise_sum_serial(std::size_t lo, std::size_t hi, F const& term) {
  if (hi - lo <= pairwise_leaf) {
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  T a = pairwise_sum_serial<T>(lo, mid, term);
  T b = pairwise_sum_serial<T>(mid, hi, term);
  return a + b;
}

#ifdef KMSGF_HAVE_OPENMP
template <class T, class F>
T pairwise_sum_task(std::size_t lo, std::size_t hi, F const& term, int depth) {
  if (depth <= 0 || hi - lo <= pairwise_leaf)
    return pairwise_sum_serial<T>(lo, hi, term);
  std::size_t mid = lo + (hi - lo) / 2;
  T a{};
  T b{};
#pragma omp task shared(a, term) firstprivate(lo, mid, depth) default(none)
  a = pairwise_sum_task<T>(lo, mid, term, depth - 1);
  b = pairwise_sum_task<T>(mid, hi, term, depth - 1);
#pragma omp taskwait
  return a + b;
}
#endif

/** Sum term(i) for i in [0, n) over the fixed pairwise tree. */
template <class T, class F>
T pairwise_sum(std::size_t n, F const& term) {
#ifdef KMSGF_HAVE_OPENMP
  if (execution_mode() == Exec::parallel && n >= pairwise_parallel_cutoff &&
      !omp_in_parallel()) {
    T result{};
#pragma omp parallel default(none) shared(result, n, term)
#pragma omp single nowait
    result = pairwise_sum_task<T>(0, n, term, pairwise_task_depth);
    return result;
  }
#endif
  return pairwise_sum_serial<T>(0, n, term);
}

} // namespace kmsgf
