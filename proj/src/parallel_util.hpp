#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mixedrobust::detail {

/**
 * Run fn(begin, end) over disjoint chunks of [0, n) on a small thread pool.
 * Callers write results into disjoint slots, so the result is deterministic
 * regardless of scheduling. The first exception is rethrown on the caller.
 */
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    hw = std::max(1u, std::min(hw, 16u));
    if (n < 512 || hw == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::size_t chunk = (n + hw - 1) / hw;
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < hw; ++t) {
        std::size_t begin = static_cast<std::size_t>(t) * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace mixedrobust::detail
