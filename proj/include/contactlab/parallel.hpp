#pragma once

#include <cstddef>
#include <functional>

namespace contactlab {

// Worker cap: CONTACTLAB_THREADS if set and positive, else hardware concurrency.
unsigned thread_cap();

// Runs fn(i) for i in [0, n). Each index is handled exactly once; callers write
// results into per-index slots so output order never depends on scheduling.
// The first exception thrown (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace contactlab
