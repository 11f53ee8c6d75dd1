#pragma once

#include <cstddef>
#include <functional>

namespace itb {

/// Worker count: IT_THREADS if set to a positive integer, otherwise the
/// machine's hardware concurrency.
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. If any call
/// throws, the exception from the smallest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace itb
