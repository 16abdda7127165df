#pragma once

#include <cstddef>
#include <functional>

namespace gnsde {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index runs
/// exactly once; the first exception thrown by any task is rethrown after all
/// threads join. workers <= 1 runs inline.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace gnsde
