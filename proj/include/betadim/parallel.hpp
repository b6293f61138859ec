#pragma once

#include <cstddef>
#include <functional>

namespace betadim {

// Worker cap shared by every parallel loop. 0 means "use BETADIM_THREADS or
// the hardware concurrency".
void set_thread_cap(unsigned cap);
unsigned thread_cap();

// Runs body(i) for i in [0, count). Tasks are handed out dynamically, so
// callers must write results into per-index slots and reduce afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace betadim
