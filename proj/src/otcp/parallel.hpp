#pragma once

#include <cstddef>
#include <functional>

namespace otcp {

// Worker count: OTCP_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t ThreadCount();

// Runs body(i) for i in [0, n) over contiguous chunks on ThreadCount()
// threads. Callers write results into per-index slots, so the outcome does
// not depend on scheduling. The first exception thrown by any chunk is
// rethrown on the calling thread.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace otcp
