#pragma once

#include <cstdlib>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

namespace flatcount {

// Effective worker count: the FLATCOUNT_THREADS environment variable wins,
// then the explicit request; 0 means "all hardware threads".
inline int resolve_threads(int requested) {
    if (const char* env = std::getenv("FLATCOUNT_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run fn(chunk_index, begin, end) over [0, n) split into static contiguous
// chunks, one per worker. Results must be combined by the caller; chunk
// boundaries depend only on (n, threads) so any reduction done in chunk
// order is deterministic.
template <typename Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (nthreads <= 1) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::size_t base = n / nthreads, extra = n % nthreads, begin = 0;
    for (std::size_t i = 0; i < nthreads; ++i) {
        std::size_t len = base + (i < extra ? 1 : 0);
        std::size_t end = begin + len;
        pool.emplace_back([&fn, i, begin, end] { fn(i, begin, end); });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

} // namespace flatcount
