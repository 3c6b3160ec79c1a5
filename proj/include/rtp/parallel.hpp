#pragma once

#include <cstddef>
#include <functional>

namespace rtp {

// Runs body(i) for i in [0, count) on up to `workers` threads. Results must be
// written to index-addressed slots by the body; completion order is unspecified.
// If any body throws, the exception thrown by the lowest index is rethrown after
// all workers have stopped, so failure behavior does not depend on scheduling.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace rtp
