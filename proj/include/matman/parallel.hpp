#pragma once

#include <cstddef>
#include <functional>

namespace matman {

/// Worker cap: MM_THREADS if set and positive, otherwise the hardware count.
int thread_count();

/// Calls fn(i) for i in [0, n) over up to thread_count() threads. Indices are
/// split into contiguous static blocks so that per-index outputs never depend
/// on scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace matman
