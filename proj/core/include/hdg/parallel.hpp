#pragma once

#include <functional>

namespace hdg {

/// Worker count from STOKES_HYBRID_THREADS; 1 (the default) is the
/// deterministic single-threaded mode.
int worker_threads();

/// Overrides the environment setting; 0 restores it.
void set_worker_threads(int n);

/// Runs body(i) for i in [begin, end) split into contiguous chunks across
/// worker_threads() threads. Callers write results into per-index slots.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace hdg
