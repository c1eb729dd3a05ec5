#ifndef LEVYWAVE_PARALLEL_HPP
#define LEVYWAVE_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace levywave {

// Fixed-size work chunks, assigned to threads in stride order. Chunk
// boundaries depend only on (n, chunk_size), never on the thread count, so
// per-chunk results can be merged deterministically.
constexpr std::size_t kChunkSize = 1024;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk = kChunkSize) {
    return (n + chunk - 1) / chunk;
}

// fn(chunk_index, begin, end) is called once per chunk; chunks run on up to
// `threads` workers. fn must only write to state owned by its chunk index.
template <typename Fn>
void for_each_chunk(std::size_t n, int threads, Fn&& fn,
                    std::size_t chunk = kChunkSize) {
    const std::size_t nchunks = chunk_count(n, chunk);
    if (nchunks == 0) return;
    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(nchunks)));
    if (nthreads == 1) {
        for (std::size_t ci = 0; ci < nchunks; ++ci)
            fn(ci, ci * chunk, std::min(n, (ci + 1) * chunk));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t ci = static_cast<std::size_t>(t); ci < nchunks;
                 ci += static_cast<std::size_t>(nthreads))
                fn(ci, ci * chunk, std::min(n, (ci + 1) * chunk));
        });
    }
    for (auto& th : pool) th.join();
}

// Pairwise (cascade) summation: associativity-stable and independent of the
// number of worker threads that produced the slots.
inline double pairwise_sum(const std::vector<double>& v) {
    std::vector<double> cur = v;
    if (cur.empty()) return 0.0;
    while (cur.size() > 1) {
        std::vector<double> next((cur.size() + 1) / 2, 0.0);
        for (std::size_t i = 0; i + 1 < cur.size(); i += 2)
            next[i / 2] = cur[i] + cur[i + 1];
        if (cur.size() % 2 == 1) next.back() = cur.back();
        cur.swap(next);
    }
    return cur[0];
}

} // namespace levywave

#endif
