#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace backdisp {

// Runs body(0..count-1) on up to `threads` workers. Each index is claimed
// exactly once, so writing results into per-index slots and reducing them
// serially afterwards gives output independent of the worker count. The
// first exception thrown by any body is rethrown on the calling thread.
inline void parallel_for(size_t count, int threads, const std::function<void(size_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    size_t nw = std::min<size_t>(static_cast<size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (size_t k = 0; k < nw; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace backdisp
