#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace specwave {

/// Runs fn(i) for i in [0, n). Each index writes only its own output slot,
/// so the result is identical for any thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t tid = 0; tid < nthreads; ++tid) {
        pool.emplace_back([&, tid] {
            for (std::size_t i = tid; i < n; i += nthreads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Thread count resolution: explicit value > 0 wins, else SPECWAVE_THREADS,
/// else 1.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPECWAVE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

}  // namespace specwave
