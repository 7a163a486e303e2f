#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace collarkit {

/// Worker count: hardware concurrency, capped by COLLARKIT_THREADS when set.
std::size_t worker_count();

/// Calls f(i) for i in [0, n) on up to worker_count() threads. After all
/// workers join, the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace collarkit
