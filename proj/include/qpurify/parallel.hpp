// parallel.hpp: Static-partition parallel loop for sweep grids

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qpurify {

// Runs body(i) for i in [0, n) on up to `workers` threads, each owning one
// contiguous block. The body writes into preallocated slots, so the result
// order never depends on scheduling. The first exception by index is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::size_t> failed_at(w, n);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t lo = n * k / w;
        const std::size_t hi = n * (k + 1) / w;
        pool.emplace_back([&, k, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[k] = std::current_exception();
                    failed_at[k] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (std::size_t k = 0; k < w; ++k) {
        if (errors[k]) std::rethrow_exception(errors[k]);
    }
}

} // namespace qpurify
