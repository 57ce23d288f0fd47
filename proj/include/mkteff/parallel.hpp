#pragma once

// Minimal index-space parallel map with exception propagation. Work items
// must be independent; results should be written to pre-sized slots so the
// outcome cannot depend on scheduling.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mkteff {

inline unsigned default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/// Invokes fn(i) for i in [0, n) across `threads` workers. The first thrown
/// exception is rethrown on the caller after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex err_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        while (!abort.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) break;
            try {
                fn(i);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!error) error = std::current_exception();
                }
                abort.store(true, std::memory_order_relaxed);
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace mkteff
