#pragma once

#include <cstddef>
#include <functional>

namespace db {

// Worker count: DIRACBOUND_THREADS if set and positive, else the hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, count) on up to worker_count() threads. Exceptions are rethrown
// on the caller's thread (the one with the smallest index wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace db
