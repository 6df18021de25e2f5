#pragma once

#include <cstddef>
#include <functional>

namespace dckit {

/// Worker count from DCKIT_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Run body(i) for i in [0, n). Indices are split into fixed contiguous chunks, so callers that
/// write per-index results and reduce afterwards get deterministic output for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace dckit
