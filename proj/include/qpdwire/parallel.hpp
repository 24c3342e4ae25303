#pragma once

#include <functional>

namespace qpdwire {

/// Runs fn(0) .. fn(num_jobs - 1) on a bounded worker pool. Callers write
/// results into preallocated per-job slots, so the schedule never affects the
/// output. threads <= 0 selects the hardware concurrency.
void parallel_for(int threads, long long num_jobs, const std::function<void(long long)>& fn);

}  // namespace qpdwire
