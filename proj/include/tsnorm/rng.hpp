#pragma once

#include <cstdint>

namespace tsnorm {

/// splitmix64 generator. All randomness in the library flows through this so
/// that a (seed, stream) pair pins every draw; trial streams are forked from
/// the run seed, which keeps trials independent of evaluation order.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1].
    double uniform01_pos() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    /// Uniform integer in [lo, hi].
    long long range(long long lo, long long hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    static SplitMix64 fork(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 mixer(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
        return SplitMix64(mixer.next());
    }
};

} // namespace tsnorm
