#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace stablab {

// Static chunked parallel loop. `fn(i)` must only write to slots owned by
// index i (typically a preallocated results vector), so the outcome is
// independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned n_threads = 0) {
    if (n == 0) return;
    unsigned hw = n_threads ? n_threads : std::thread::hardware_concurrency();
    if (hw <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (hw > n) hw = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(hw);
    const std::size_t chunk = (n + hw - 1) / hw;
    for (unsigned t = 0; t < hw; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace stablab
