#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cusplab {

/// Number of worker threads used by parallel_for. Defaults to the value of
/// CUSPLAB_THREADS, else std::thread::hardware_concurrency().
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Iterations are distributed over the worker
/// threads; nested calls from inside a worker run serially. Callers write
/// results into per-index slots, so any reduction done afterwards is
/// independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace cusplab
