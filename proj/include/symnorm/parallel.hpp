#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace symnorm {

// Runs work(0), ..., work(nblocks-1) across up to `threads` workers.
// Each index is claimed exactly once; callers store per-index results and
// reduce them in index order afterwards, which keeps every reduction
// independent of the thread count.
inline void for_each_block(std::size_t nblocks, int threads,
                           const std::function<void(std::size_t)>& work) {
    if (threads < 1) threads = 1;
    if (threads == 1 || nblocks <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) work(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            work(b);
        }
    };
    std::vector<std::thread> pool;
    const int nw = static_cast<int>(std::min<std::size_t>(threads, nblocks));
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace symnorm
