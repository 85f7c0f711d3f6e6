#pragma once

#include <cstddef>
#include <functional>

namespace ptforge::parallel {

// Worker count for sweeps: the PT_FORGE_THREADS environment variable when it
// parses to a positive integer, otherwise the hardware concurrency (at least
// one either way).
std::size_t worker_count();

// Runs body(i) for every i in [0, n) on `workers` threads which pull indices
// from a shared counter.  Each index runs exactly once; bodies must write
// only to their own preallocated output slot, which makes results identical
// for any worker count.  The first exception thrown by a body is rethrown on
// the calling thread after all workers finish.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace ptforge::parallel
