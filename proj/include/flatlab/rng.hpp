#pragma once

#include <cstdint>

namespace flatlab {

// Deterministic, platform-stable RNG. splitmix64 core; per-index derived
// streams make parallel sampling independent of the worker count.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Stream for sample #index of the run with this seed; stable across thread
    // counts because it depends only on (seed, index). The initial state is a
    // full hash of (seed, index): if consecutive indices merely added a
    // multiple of the generator's own increment, stream i+k would replay
    // stream i shifted by k draws.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        auto mix = [](std::uint64_t z) {
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return z ^ (z >> 31);
        };
        std::uint64_t a = mix(seed + 0x9e3779b97f4a7c15ull);
        std::uint64_t b = mix(index + 0x6a09e667f3bcc909ull);
        Rng r(mix(a ^ (b * 0xff51afd7ed558ccdull)));
        r.next_u64();
        return r;
    }
};

}  // namespace flatlab
