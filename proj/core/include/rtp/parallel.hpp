#pragma once

#include <cstddef>
#include <functional>

namespace rtp {

/// Worker count from RTP_WORKERS, else 1.
int default_workers();

/// Calls fn(i) for i in [0, count) on `workers` threads. Callers write results by index,
/// so outputs never depend on the worker count. The first exception is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace rtp
