#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace platekit {

// Run fn(i) for i in [0, n) across up to `jobs` threads. Work is handed out
// through an atomic counter, so results must not depend on which thread runs
// which index. The first exception thrown wins and is rethrown here.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
    if (n == 0) return;
    const size_t workers = std::min<size_t>(std::max(jobs, 1), n);
    if (workers == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace platekit
