#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace splintcad {

// Worker count: SPLINTCAD_THREADS env var, else hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("SPLINTCAD_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Static block partition; results must be written to disjoint slots so the
// outcome is independent of the thread count.
template <typename Fn>
void parallel_for(size_t begin, size_t end, Fn&& fn) {
    size_t n = end > begin ? end - begin : 0;
    unsigned workers = thread_count();
    if (n == 0) return;
    if (workers <= 1 || n < 2 * workers) {
        for (size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        size_t lo = begin + w * chunk;
        size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace splintcad
