#pragma once

#include <cstddef>
#include <functional>

namespace hypofp {

// Worker count: HYPOFP_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Results must not
// depend on the chunking; callers write into per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hypofp
