#pragma once

#include <cstddef>
#include <functional>

namespace voi {

// Worker count for parallel_for. 0 means std::thread::hardware_concurrency().
void set_threads(std::size_t n);
std::size_t threads();

// Runs body(i) for i in [0, n). Iterations must only write their own slots;
// nested calls from inside a worker run serially. The first exception thrown
// by any iteration is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace voi
