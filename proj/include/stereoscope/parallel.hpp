#pragma once

#include <functional>

namespace stereoscope {

// Worker count resolution: an explicit request > 0 wins, then the
// STEREOSCOPE_WORKERS environment variable, then hardware concurrency.
int resolve_workers(int requested = 0);

// Runs fn(i) for i in [0, n) on a static partition of `workers` threads.
// fn must write only to slots owned by index i so the result is identical
// for every worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace stereoscope
