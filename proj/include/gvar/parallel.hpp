#pragma once

#include <cstdlib>
#include <cstddef>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace gvar {

/// Worker cap from GVAR_THREADS (0 or unset = hardware concurrency).
inline std::size_t worker_count() {
    std::size_t n = 0;
    if (const char* env = std::getenv("GVAR_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = static_cast<std::size_t>(v);
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// processed exactly once; fn must only write state owned by index i, which
/// keeps results identical to the sequential order.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace gvar
