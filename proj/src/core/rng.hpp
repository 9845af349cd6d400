#pragma once

#include <cstdint>
#include <random>

namespace stego {

// All randomness in the library flows through a caller-supplied Rng so that
// every run is reproducible from a single 64-bit seed. mt19937_64 output is
// pinned by the C++ standard, which keeps files and transcripts bit-stable
// across builds.
using Rng = std::mt19937_64;

// splitmix64, used to derive independent per-trial streams from a master
// seed without correlations between adjacent trial indices.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Stream i of a master seed. Trials that run concurrently each take their
// own stream, so results do not depend on scheduling.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(splitmix64(master_seed ^ splitmix64(index)));
}

// Uniform double in [0,1) with 53 random bits. Hand-rolled instead of
// std::uniform_real_distribution, whose output is implementation-defined.
inline double canonical_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Rejection keeps the distribution exact and the
// consumption pattern deterministic for a given seed.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

}  // namespace stego
