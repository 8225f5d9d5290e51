#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace looptex {

/// Effective worker count: `requested` if positive, otherwise the hardware
/// concurrency (at least 1).
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for every i in [begin, end), split into contiguous chunks over
/// `threads` workers (0 = hardware concurrency). Workers own disjoint index
/// ranges, so anything indexed by i comes out identical to a sequential run.
/// The first exception raised by any worker is rethrown.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int)>& fn) {
    const int n = end - begin;
    if (n <= 0) return;
    threads = std::min(resolve_threads(threads), n);
    if (threads <= 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        const int chunk_begin =
            begin + static_cast<int>(static_cast<long long>(n) * t / threads);
        const int chunk_end =
            begin + static_cast<int>(static_cast<long long>(n) * (t + 1) / threads);
        workers.emplace_back([&fn, &errors, t, chunk_begin, chunk_end] {
            try {
                for (int i = chunk_begin; i < chunk_end; ++i) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace looptex
