#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tklab {

/// Execution mode for the data-parallel kernels. Every kernel has a serial
/// reference path; the parallel path must produce bit-identical results
/// (element-wise work only, no cross-iteration reductions with reordered
/// summation).
enum class ExecMode { serial, parallel };

namespace detail {
inline ExecMode& exec_mode_ref() {
  static ExecMode mode = ExecMode::parallel;
  return mode;
}
}  // namespace detail

inline ExecMode default_exec_mode() { return detail::exec_mode_ref(); }
inline void set_default_exec_mode(ExecMode m) { detail::exec_mode_ref() = m; }

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// fn(i) for i in [0, n). Iterations must be independent.
template <class F>
void parallel_for(std::int64_t n, F&& fn, ExecMode mode = default_exec_mode()) {
#ifdef _OPENMP
  if (mode == ExecMode::parallel && n > 1) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
#else
  (void)mode;
#endif
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

/// vals[i] = fn(i) with exceptions contained: a throwing fn aborts the batch
/// and the failing call is replayed serially so the error (and which index
/// reports it) is deterministic.
template <class F>
std::vector<double> parallel_map(std::int64_t n, F&& fn, ExecMode mode = default_exec_mode()) {
  std::vector<double> vals(static_cast<std::size_t>(n));
#ifdef _OPENMP
  if (mode == ExecMode::parallel && n > 1) {
    bool failed = false;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      bool skip;
#pragma omp atomic read
      skip = failed;
      if (skip) continue;
      try {
        vals[i] = fn(i);
      } catch (...) {
#pragma omp atomic write
        failed = true;
      }
    }
    if (failed) {
      for (std::int64_t i = 0; i < n; ++i) vals[i] = fn(i);  // throws deterministically
    }
    return vals;
  }
#else
  (void)mode;
#endif
  for (std::int64_t i = 0; i < n; ++i) vals[i] = fn(i);
  return vals;
}

/// max over i of fn(i). Exact regardless of iteration order.
template <class F>
double parallel_max(std::int64_t n, F&& fn, ExecMode mode = default_exec_mode()) {
  double result = -1e308;
#ifdef _OPENMP
  if (mode == ExecMode::parallel && n > 1) {
#pragma omp parallel for schedule(static) reduction(max : result)
    for (std::int64_t i = 0; i < n; ++i) {
      double v = fn(i);
      if (v > result) result = v;
    }
    return result;
  }
#else
  (void)mode;
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    double v = fn(i);
    if (v > result) result = v;
  }
  return result;
}

}  // namespace tklab
