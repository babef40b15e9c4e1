#pragma once

#include <cstddef>
#include <functional>

namespace heis {

// Worker count for grid fan-out and search chains: HEISBCP_THREADS if set,
// otherwise the hardware concurrency, clamped to [1, 16].
int worker_count();

// Runs f(0..n-1) across workers. Each call writes only its own slot of
// caller-owned storage, so results never depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace heis
