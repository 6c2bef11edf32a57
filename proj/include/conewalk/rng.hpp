#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace conewalk {

// Stream seeds are decorrelated through splitmix64 before feeding the fully
// specified (hence build-reproducible) mt19937_64 engine. Replica r of a run
// with base seed s uses stream_seed(s, r).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x51ed2701ab0587e5ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t base, std::uint64_t stream) {
    return std::mt19937_64(stream_seed(base, stream));
}

// 53-bit uniform in [0, 1); avoids std::uniform_real_distribution, whose
// algorithm is implementation-defined.
inline double uniform_unit(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Index of the first cdf entry > u.
inline int sample_cdf(const std::vector<double>& cdf, double u) {
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (cdf[mid] > u)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

// Uniform on {1, ..., n}; n == 1 consumes no randomness so that a lazy driver
// with ell = 1 replays the base walk bit for bit.
inline int uniform_1_to_n(std::mt19937_64& g, int n) {
    if (n <= 1) return 1;
    const int draw = 1 + static_cast<int>(uniform_unit(g) * n);
    return draw > n ? n : draw;
}

} // namespace conewalk
