#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace cgt {

/// Runs fn(0..n-1), possibly on several threads. Each index must write only
/// its own output slot; results are then independent of the thread count.
template <typename Fn>
void for_each_agent(int threads, int n, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, n);
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&next, n, &fn] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (std::thread& th : pool) th.join();
}

} // namespace cgt
