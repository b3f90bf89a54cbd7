#pragma once

// Deterministic parallel-for: static block partition, results written by
// index.  Output never depends on the thread count.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace halfwave {

inline std::atomic<int>& thread_count_ref() {
    static std::atomic<int> n{0}; // 0 = hardware concurrency
    return n;
}

inline void set_default_threads(int n) { thread_count_ref().store(n); }

inline int default_threads() {
    int n = thread_count_ref().load();
    if (n > 0) return n;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <class F>
void parallel_for(std::size_t n, F&& f, int threads = 0) {
    if (n == 0) return;
    int nt = threads > 0 ? threads : default_threads();
    if (static_cast<std::size_t>(nt) > n) nt = static_cast<int>(n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::mutex err_mx;
    for (int t = 0; t < nt; ++t) {
        const std::size_t lo = n * t / nt;
        const std::size_t hi = n * (t + 1) / nt;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi && !failed.load(); ++i) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mx);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace halfwave
