#pragma once

#include <array>
#include <cstdint>

#include "bits.hpp"
#include "error.hpp"

namespace stego {

// Deterministic bit-stream expansion of a 256-bit master seed, built on
// the ChaCha20 block permutation in counter mode. Properties the stream
// layer depends on:
//   * variable output: expand(seed, y) has exactly y bits;
//   * prefix consistency: expand(seed, y) is a prefix of expand(seed, y+1);
//   * O(1) resume: ResumePoint pins (block, offset) so the bits after
//     position N come out without regenerating the first N.
namespace prg {

constexpr std::size_t kSeedBytes = 32;
constexpr std::uint64_t kBlockBits = 512;

using Seed = std::array<std::uint8_t, kSeedBytes>;

struct ResumePoint {
    std::uint64_t block = 0;      // N / 512
    std::uint32_t offset = 0;     // N % 512
    std::uint64_t fingerprint = 0;  // binds the point to its seed

    std::uint64_t position_bits() const { return block * kBlockBits + offset; }
};

// Seed identity check value; derived from a reserved block counter that
// expansion can never reach.
std::uint64_t seed_fingerprint(const Seed& seed);

ResumePoint start(const Seed& seed);

// First y bits of the stream.
BitVec expand(const Seed& seed, std::uint64_t y);

// The y bits following `at`, and the advanced resume point. Errors with
// state_mismatch when the point was minted for a different seed.
BitVec resume(const Seed& seed, ResumePoint& at, std::uint64_t y);

// Raw block access, exposed for tests.
std::array<std::uint8_t, 64> block(const Seed& seed, std::uint64_t counter);

}  // namespace prg

}  // namespace stego
