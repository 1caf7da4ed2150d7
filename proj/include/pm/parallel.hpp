#pragma once

#include <cstddef>
#include <functional>

namespace pm {

/// Worker cap: PM_THREADS when set (>=1), hardware concurrency otherwise.
int worker_cap();

/// Runs fn(i) for i in [0, n). Spawns up to worker_cap() threads when the
/// cap allows and n > 1; otherwise runs inline. Each index writes only its
/// own slot, so results are independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pm
