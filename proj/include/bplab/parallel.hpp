#pragma once

#include <cstddef>
#include <functional>

namespace bplab {

// Worker count: BPLAB_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index must write only its own outputs, so
// results never depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bplab
