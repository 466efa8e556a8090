#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

namespace spnnz {

/// 0 means "use all hardware threads".
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Static block partition of [0, n) across `threads` workers.
/// fn(tid, begin, end) runs once per worker; block boundaries depend only on
/// (n, threads), so per-thread results combine into the same totals for any
/// thread count as long as the combine step is order-independent (integer
/// sums, max) or performed in tid order.
template <typename Fn>
void parallel_blocks(std::int64_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
    if (workers == 1) {
        fn(0, std::int64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int tid = 1; tid < workers; ++tid) {
        const std::int64_t begin = n * tid / workers;
        const std::int64_t end = n * (tid + 1) / workers;
        pool.emplace_back([&fn, tid, begin, end] { fn(tid, begin, end); });
    }
    fn(0, std::int64_t{0}, n / workers);
    for (auto& t : pool) t.join();
}

} // namespace spnnz
