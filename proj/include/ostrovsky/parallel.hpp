#pragma once

#include <cstddef>
#include <functional>

namespace ostrovsky {

/// std::thread::hardware_concurrency(), at least 1.
int default_jobs();

/// Runs body(i) for i in [0, count) on up to `jobs` threads (jobs <= 0 means
/// default_jobs()). Indices are handed out dynamically, so the body must write
/// its result by index. The first exception thrown by any body is rethrown
/// after all workers have stopped.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace ostrovsky
