#pragma once

#include <cstddef>
#include <functional>

namespace stickylab {

/// Number of workers to use: explicit request if > 0, else the
/// STICKYLAB_WORKERS environment variable, else hardware concurrency.
int resolve_workers(int requested);

/// Runs fn(begin, end) over a static partition of [0, n) into `workers`
/// contiguous blocks, one thread per non-empty block. Results must be written
/// to disjoint, index-addressed slots; because the partition is a pure
/// function of (n, nothing else), output never depends on the worker count.
void parallel_blocks(std::size_t n, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace stickylab
