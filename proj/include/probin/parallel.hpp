#pragma once

#include <cstddef>
#include <functional>

namespace probin {

/// Thread count for a run: PROBIN_THREADS when set to a positive integer,
/// otherwise `requested` (clamped to at least 1).
int resolve_threads(int requested);

/// Calls body(i) for i in [0, n) on up to `threads` worker threads. Results
/// must be written to per-index slots. If any call throws, the exception of
/// the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace probin
