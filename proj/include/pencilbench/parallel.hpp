// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pencilbench {

/// 0 means "machine parallelism".
[[nodiscard]] inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) for i in [0, n). Results land by index, so the output does not
/// depend on the thread count. The exception of the lowest failing index is rethrown.
template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t n, unsigned threads, Fn&& fn) {
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errs(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const unsigned nt = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (unsigned k = 0; k < nt; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace pencilbench
