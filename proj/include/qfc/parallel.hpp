// Index-sharded parallel loop. Results must be written to preallocated
// per-index slots and any randomness must come from per-index seeds; under
// that contract the output is identical for any worker count.

#pragma once

#include <cstddef>
#include <functional>

namespace qfc {

// Worker cap from QFCBENCH_THREADS (0 or unset = hardware concurrency),
// re-read on every call.
int worker_count();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace qfc
