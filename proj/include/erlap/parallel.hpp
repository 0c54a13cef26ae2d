#ifndef ERLAP_PARALLEL_HPP
#define ERLAP_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace erlap {

inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls fn(r) for r in [0, count) on up to `workers` threads. Work is
/// handed out dynamically, so fn must write its result into a slot owned by
/// r; callers then reduce in index order, which keeps results independent
/// of the schedule. The first exception thrown by any call is rethrown.
template <class Fn>
void for_each_index(std::uint64_t count, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (workers == 1 || count <= 1) {
        for (std::uint64_t r = 0; r < count; ++r) fn(r);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::uint64_t r = next.fetch_add(1);
            if (r >= count) return;
            try {
                fn(r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(body);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace erlap

#endif  // ERLAP_PARALLEL_HPP
