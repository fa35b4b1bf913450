#pragma once

#include <cstddef>
#include <functional>

namespace echoaudio {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads (jobs <= 1 runs
/// inline). Results must be written to per-index slots by the caller, so the
/// outcome never depends on scheduling. The exception thrown for the lowest
/// failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace echoaudio
