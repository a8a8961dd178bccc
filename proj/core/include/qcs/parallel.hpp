#pragma once

#include <cstddef>
#include <functional>

namespace qcs {

// Runs body(i) for i in [0, n) on up to `workers` threads in contiguous
// chunks. Each index must write only its own output slot; results are then
// independent of the worker count. Exceptions are rethrown on the caller.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace qcs
