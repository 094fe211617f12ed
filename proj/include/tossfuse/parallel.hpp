#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace tossfuse {

// Worker cap shared by all parallel loops: --threads N, else TOSSFUSE_THREADS,
// else hardware concurrency.
void set_thread_cap(unsigned n);
unsigned thread_cap();

// Runs fn(i) for i in [0, n). Work is split into contiguous index blocks, one
// per worker; every fn(i) writes only to slot i of preallocated outputs, so
// results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tossfuse
