#ifndef TOPOCLUST_PARALLEL_HPP
#define TOPOCLUST_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace topoclust {

/// Resolves a requested worker count. 0 means "use the hardware", and the
/// TOPOCLUST_THREADS environment variable caps the result either way so that
/// shared machines can be tamed without touching call sites.
inline std::size_t thread_budget(std::size_t requested) {
    std::size_t budget = requested;
    if (budget == 0) {
        budget = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    if (const char* env = std::getenv("TOPOCLUST_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) budget = std::min(budget, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, budget);
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
///
/// Indices are split into contiguous blocks, one per worker. Callers must
/// only write to locations owned by index i; under that discipline the result
/// is identical for any worker count, so parallelism never perturbs output.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (count == 0) return;
    const std::size_t workers = std::min(thread_budget(threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace topoclust

#endif
