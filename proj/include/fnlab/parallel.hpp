#pragma once

#include <thread>
#include <vector>

namespace fnlab {

/// Static-chunk parallel map over [0,n). Each index writes only its own output
/// slots, so results are identical for every thread count; reductions are done
/// serially by the caller afterwards.
template <typename F>
void parallel_for(int n, int threads, F&& fn) {
    if (threads <= 1 || n < 2 * threads) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        int lo = t * chunk;
        int hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace fnlab
