#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pmuplace {

// Worker cap: explicit argument if positive, else PMUPLACE_THREADS, else
// hardware concurrency.
inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PMUPLACE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(0..n-1), work-stealing via an atomic counter. fn must only touch
// disjoint state per index; results are then independent of the schedule.
template <typename Fn>
void parallel_for_index(int n, int threads, Fn&& fn) {
    threads = std::min(resolve_thread_count(threads), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace pmuplace
