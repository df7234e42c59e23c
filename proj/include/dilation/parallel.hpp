#pragma once

#include <cstddef>
#include <vector>

#include <omp.h>

namespace dilation {

/// Execution policy for the data-parallel kernels. `Serial` is the reference
/// path; `Parallel` distributes independent iterations over OpenMP threads.
/// Kernels write per-index results into preallocated slots and reduce them in
/// index order afterwards, so both policies produce bit-identical output.
enum class Exec { Serial, Parallel };

/// Thread count used by `Exec::Parallel`. Honors DILATION_THREADS when set to
/// a positive integer, otherwise the OpenMP default.
int thread_count();

/// Re-reads DILATION_THREADS and applies it to the OpenMP runtime.
void configure_threads_from_env();

template <class Fn>
void for_each_index(Exec exec, std::size_t count, Fn&& fn) {
  if (exec == Exec::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
  for (long long i = 0; i < n; ++i) fn(static_cast<std::size_t>(i));
}

/// Evaluates `fn(i)` for every index and returns the results in index order.
template <class T, class Fn>
std::vector<T> map_indices(Exec exec, std::size_t count, Fn&& fn) {
  std::vector<T> out(count);
  for_each_index(exec, count, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace dilation
