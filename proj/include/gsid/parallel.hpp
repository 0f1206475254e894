#pragma once

#include <functional>

namespace gsid {

/// Number of worker threads currently configured (never 0).
int thread_count();

/// Sets the worker count. 0 restores the hardware default. Takes effect on
/// the next parallel_chunks call; not safe to call from inside a parallel
/// region.
void set_thread_count(int n);

/// Runs fn(chunk) for every chunk in [0, num_chunks) across the worker pool.
///
/// The chunk decomposition is the caller's and must not depend on the
/// worker count; callers that reduce do so by writing per-chunk partials
/// and merging them in chunk order afterwards. That is what makes every
/// result of this function independent of the configured thread count.
void parallel_chunks(int num_chunks, const std::function<void(int)>& fn);

/// Convenience: splits [0, n) into fixed-size blocks and runs
/// fn(begin, end) per block.
void parallel_blocks(size_t n, size_t block_size,
                     const std::function<void(size_t, size_t)>& fn);

} // namespace gsid
