#include "heisbcp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace heis {

int worker_count() {
    if (const char* env = std::getenv("HEISBCP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min(n, 16);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::clamp<int>(static_cast<int>(hw), 1, 16);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    const int workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                f(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace heis
