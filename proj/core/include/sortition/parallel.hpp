#pragma once

#include <functional>

namespace sortition {

// SORTITION_THREADS if set and positive, else hardware concurrency (at least 1).
int thread_count();

// Runs fn(0..count-1) on up to thread_count() threads. The first exception thrown
// by any task is rethrown after all workers stop.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace sortition
