#pragma once

#include <cstddef>
#include <functional>

namespace exemplar {

// Worker count: `requested` (0 = hardware concurrency), capped by the
// EXEMPLAR_THREADS environment variable when set. Always >= 1.
std::size_t worker_count(std::size_t requested = 0);

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any call is rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace exemplar
