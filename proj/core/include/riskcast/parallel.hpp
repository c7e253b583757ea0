#pragma once

#include <cstddef>
#include <functional>

namespace riskcast {

/// Worker count resolution: explicit request > RISKCAST_THREADS env var >
/// hardware concurrency. Always at least 1.
unsigned resolve_parallelism(unsigned requested = 0);

/// Runs body(i) for i in [0, n) on a bounded worker pool. Results must be
/// written to per-index slots; outputs are then independent of scheduling.
/// Exceptions from the body are rethrown (first one wins).
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

} // namespace riskcast
