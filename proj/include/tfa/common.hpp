#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfa {

using cplx = std::complex<double>;
using i64 = int64_t;
inline constexpr double pi = 3.141592653589793238462643383279502884;

inline cplx unit_phase(double turns) {
    return std::polar(1.0, 2.0 * pi * turns);
}

// Deterministic per-stream RNG. Streams derived from a master seed and a
// stream index stay stable regardless of how many draws other streams make.
struct rng_stream {
    uint64_t state;

    explicit rng_stream(uint64_t seed, uint64_t index = 0)
        : state(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1))) {
        next_u64();
        next_u64();
    }

    uint64_t next_u64() {
        // splitmix64
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() {  // uniform in [0,1)
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    int64_t next_in(int64_t lo, int64_t hi) {  // uniform integer in [lo, hi]
        if (hi <= lo) return lo;
        return lo + int64_t(next_u64() % uint64_t(hi - lo + 1));
    }
};

[[noreturn]] inline void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

inline void require(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
}

}  // namespace tfa
