#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace affsob {

namespace detail {
inline std::atomic<int>& thread_setting() {
    static std::atomic<int> n{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
    return n;
}
} // namespace detail

/// Caps the number of worker threads used by node loops. Results do not depend
/// on this value: reductions are always combined in a fixed chunk order.
inline void set_thread_count(int n) { detail::thread_setting().store(std::max(1, n)); }
inline int thread_count() { return detail::thread_setting().load(); }

/// Fixed chunk length for reductions. Part of the numerical contract.
inline constexpr std::size_t kReductionChunk = 1u << 14;

/// Calls body(begin, end) over disjoint chunks covering [0, n).
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(thread_count()), chunks));
    if (workers <= 1) {
        if (n > 0) body(std::size_t{0}, n);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
            const std::size_t b = c * kReductionChunk;
            body(b, std::min(n, b + kReductionChunk));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

/// Sum of term(i) over [0, n); per-chunk partial sums are added in chunk order.
template <class Term>
double deterministic_sum(std::size_t n, Term&& term) {
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    std::vector<double> partial(chunks, 0.0);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        // parallel_for chunks are either the whole range or aligned chunks
        for (std::size_t c0 = b; c0 < e; c0 += kReductionChunk) {
            const std::size_t c1 = std::min(e, c0 + kReductionChunk);
            double s = 0.0;
            for (std::size_t i = c0; i < c1; ++i) s += term(i);
            partial[c0 / kReductionChunk] = s;
        }
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

/// K simultaneous sums. body(begin, end, acc) adds the contributions of
/// [begin, end) into acc (zero-initialised per chunk); chunks are combined in order.
template <std::size_t K, class Body>
std::array<double, K> deterministic_accumulate(std::size_t n, Body&& body) {
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    std::vector<std::array<double, K>> partial(chunks);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t c0 = b; c0 < e; c0 += kReductionChunk) {
            const std::size_t c1 = std::min(e, c0 + kReductionChunk);
            std::array<double, K> acc{};
            body(c0, c1, acc);
            partial[c0 / kReductionChunk] = acc;
        }
    });
    std::array<double, K> total{};
    for (const auto& p : partial)
        for (std::size_t k = 0; k < K; ++k) total[k] += p[k];
    return total;
}

} // namespace affsob
