#pragma once

#include <cstddef>
#include <functional>

namespace sqz {

// Worker count: SQUEEZELAB_THREADS if set to a positive integer, otherwise
// the hardware concurrency (at least 1).
int thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() threads. The first
// exception thrown by a worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sqz
