#pragma once

#include <cstddef>
#include <functional>

namespace lusw {

/// Worker count: LUSW_THREADS when set to a positive integer, otherwise
/// (unset or 0) the hardware concurrency. Never below 1.
int worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; the first exception is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lusw
