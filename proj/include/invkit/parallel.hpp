#pragma once

#include <cstddef>
#include <functional>

namespace invkit {

/// Applies fn(i) for i in [0, n) on up to `workers` threads. The first
/// exception thrown by fn is rethrown after all workers finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace invkit
