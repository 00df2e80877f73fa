#pragma once

#include <cstddef>
#include <functional>

namespace degennes {

/// Worker count: DEGENNES_NUM_THREADS when set and positive, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
/// is handled exactly once; callers write results into slot i, so the merge
/// order is fixed. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace degennes
