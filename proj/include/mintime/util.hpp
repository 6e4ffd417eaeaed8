#pragma once

#include <cstddef>
#include <functional>

namespace mintime {

// Worker cap from MINTIME_THREADS (0 or unset = auto).
int worker_threads();

// Deterministic parallel map over [0, count): results depend only on the index,
// never on the thread schedule. Falls back to a serial loop for small counts.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace mintime
