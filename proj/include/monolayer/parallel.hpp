#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace monolayer {

namespace detail {
inline int& thread_override() {
    static int n = 0;  // 0 = not forced
    return n;
}
}  // namespace detail

// 0 restores automatic selection (MONOLAYER_THREADS env, else hardware).
inline void set_thread_count(int n) { detail::thread_override() = n > 0 ? n : 0; }

inline int effective_threads() {
    if (detail::thread_override() > 0) return detail::thread_override();
    if (const char* env = std::getenv("MONOLAYER_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
// thread, so any reduction done per-chunk and merged in chunk order is
// deterministic for a fixed thread count. Exceptions propagate (first one).
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int threads = std::min<std::size_t>(effective_threads(), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace monolayer
