#pragma once

#include <cstddef>
#include <functional>

namespace cwlab {

/// Worker count: hardware concurrency, capped by CWLAB_THREADS when set.
int worker_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written per index are independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cwlab
