#pragma once

#include <cstdint>
#include <functional>

namespace ambiup {

// Runs fn(i) for i in [0, n) split across up to `threads` workers on
// contiguous index ranges.  Each index is executed exactly once by exactly
// one worker, so results are bit-identical for any thread count as long as
// different indices touch disjoint outputs.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

}  // namespace ambiup
