#pragma once

#include <cstddef>
#include <functional>

namespace slvst {

/// Worker threads used by parallel_for. 0 selects the hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(i) for i in [0, n). Each index must write only its own output slot,
/// so results are independent of scheduling. If any call throws, the
/// exception from the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace slvst
