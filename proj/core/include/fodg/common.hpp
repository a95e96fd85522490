#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fodg {

/// Caller misuse: violated precondition, bad parameter combination.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent on-disk data.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Node index layout: low 31 bits are the id, the MSB is reserved as the
// per-search parent flag. Datasets are limited to 2^31 - 1 vectors.
inline constexpr std::uint32_t kIdMask = 0x7fffffffu;
inline constexpr std::uint32_t kParentFlag = 0x80000000u;
inline constexpr std::uint32_t kInvalidId = 0xffffffffu;
inline constexpr std::uint64_t kMaxNodes = kIdMask;  // 2^31 - 1

inline std::uint32_t strip_flag(std::uint32_t id) { return id & kIdMask; }
inline bool has_parent_flag(std::uint32_t id) { return (id & kParentFlag) != 0; }

/// splitmix64; used to derive independent per-node / per-query seeds from one
/// top-level seed so results do not depend on worker count.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline unsigned resolve_thread_count(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Static-partition parallel loop over [0, n). Each index is processed exactly
/// once by exactly one worker; output written to disjoint per-index slots is
/// deterministic regardless of the worker count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned num_threads, Fn&& fn) {
    unsigned t = resolve_thread_count(num_threads);
    if (t <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (static_cast<std::size_t>(t) > n) t = static_cast<unsigned>(n);
    std::vector<std::thread> workers;
    workers.reserve(t);
    std::size_t chunk = (n + t - 1) / t;
    for (unsigned w = 0; w < t; ++w) {
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& th : workers) th.join();
}

}  // namespace fodg
