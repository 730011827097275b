#pragma once

#include <cstddef>
#include <functional>

namespace noisydet {

/// Worker count: `requested` if nonzero, else NOISYDET_THREADS if set and
/// valid, else std::thread::hardware_concurrency() (at least 1).
unsigned resolve_threads(unsigned requested = 0);

/// Runs body(i) for i in [0, n) over contiguous chunks on up to `threads`
/// workers. Callers write results by index, so output never depends on the
/// worker count. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace noisydet
