#include "prg.hpp"

#include <bit>
#include <cstring>

namespace stego::prg {

namespace {

inline std::uint32_t load32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void quarter_round(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c, std::uint32_t& d) {
    a += b; d ^= a; d = std::rotl(d, 16);
    c += d; b ^= c; b = std::rotl(b, 12);
    a += b; d ^= a; d = std::rotl(d, 8);
    c += d; b ^= c; b = std::rotl(b, 7);
}

// Reserved counter for the fingerprint block; expansion asserts it stays
// strictly below this.
constexpr std::uint64_t kFingerprintCounter = ~std::uint64_t{0};

}  // namespace

std::array<std::uint8_t, 64> block(const Seed& seed, std::uint64_t counter) {
    // ChaCha20 block function, 64-bit counter / 64-bit zero nonce layout.
    std::uint32_t state[16];
    state[0] = 0x61707865u;
    state[1] = 0x3320646eu;
    state[2] = 0x79622d32u;
    state[3] = 0x6b206574u;
    for (int i = 0; i < 8; ++i) state[4 + i] = load32(seed.data() + 4 * i);
    state[12] = static_cast<std::uint32_t>(counter);
    state[13] = static_cast<std::uint32_t>(counter >> 32);
    state[14] = 0;
    state[15] = 0;

    std::uint32_t x[16];
    std::memcpy(x, state, sizeof(x));
    for (int round = 0; round < 10; ++round) {
        quarter_round(x[0], x[4], x[8], x[12]);
        quarter_round(x[1], x[5], x[9], x[13]);
        quarter_round(x[2], x[6], x[10], x[14]);
        quarter_round(x[3], x[7], x[11], x[15]);
        quarter_round(x[0], x[5], x[10], x[15]);
        quarter_round(x[1], x[6], x[11], x[12]);
        quarter_round(x[2], x[7], x[8], x[13]);
        quarter_round(x[3], x[4], x[9], x[14]);
    }
    std::array<std::uint8_t, 64> out;
    for (int i = 0; i < 16; ++i) {
        const std::uint32_t v = x[i] + state[i];
        out[4 * i + 0] = static_cast<std::uint8_t>(v);
        out[4 * i + 1] = static_cast<std::uint8_t>(v >> 8);
        out[4 * i + 2] = static_cast<std::uint8_t>(v >> 16);
        out[4 * i + 3] = static_cast<std::uint8_t>(v >> 24);
    }
    return out;
}

std::uint64_t seed_fingerprint(const Seed& seed) {
    const auto b = block(seed, kFingerprintCounter);
    std::uint64_t fp = 0;
    for (int i = 0; i < 8; ++i) fp |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return fp;
}

ResumePoint start(const Seed& seed) { return ResumePoint{0, 0, seed_fingerprint(seed)}; }

BitVec resume(const Seed& seed, ResumePoint& at, std::uint64_t y) {
    if (at.fingerprint != seed_fingerprint(seed))
        fail(Errc::state_mismatch, "resume point does not belong to this seed");
    BitVec out(static_cast<std::size_t>(y));
    std::uint64_t filled = 0;
    std::uint64_t blk = at.block;
    std::uint32_t off = at.offset;
    while (filled < y) {
        if (blk >= kFingerprintCounter)
            fail(Errc::invalid_argument, "PRG stream exhausted");
        const auto bytes = block(seed, blk);
        for (; off < kBlockBits && filled < y; ++off, ++filled) {
            const bool bit = (bytes[off / 8] >> (off % 8)) & 1;
            out.set(static_cast<std::size_t>(filled), bit);
        }
        if (off == kBlockBits) {
            ++blk;
            off = 0;
        }
    }
    at.block = blk;
    at.offset = off;
    return out;
}

BitVec expand(const Seed& seed, std::uint64_t y) {
    ResumePoint at = start(seed);
    return resume(seed, at, y);
}

}  // namespace stego::prg
