#pragma once

#include <cstddef>
#include <functional>

namespace finsler {

// Worker count: FINSLER_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int default_worker_count();

// Runs body(i) for i in [0, count) on up to `workers` threads. Each index runs
// exactly once; results must be written to index-owned slots so output is
// independent of scheduling. The first exception thrown by any body is
// rethrown after all workers join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace finsler
