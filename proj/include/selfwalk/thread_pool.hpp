#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

// Bounded worker pool for embarrassingly parallel seed/grid loops. Each job
// writes only its own output slot, so results are identical for any worker
// count; SELFWALK_THREADS caps the pool.

namespace selfwalk {

inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("SELFWALK_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    if (jobs < n) n = static_cast<unsigned>(jobs);
    return n == 0 ? 1 : n;
}

template <typename Fn>
void parallel_for_index(std::size_t jobs, Fn&& fn) {
    unsigned workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < jobs;) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace selfwalk
