#include "gf2.hpp"

// Smallest odd 64-bit tail g such that x^r + g is irreducible over GF(2),
// indexed by degree r. Entry 0 is unused. Each entry is checked against an
// independent irreducibility test in the unit suite.

namespace stego::gf2 {

const std::uint64_t kMinTailTable[257] = {
    0,  // r = 0 unused
    0x1,     0x3,     0x3,     0x3,     0x5,     0x3,     0x3,     0x1b,
    0x3,     0x9,     0x5,     0x9,     0x1b,     0x21,     0x3,     0x2b,
    0x9,     0x9,     0x27,     0x9,     0x5,     0x3,     0x21,     0x1b,
    0x9,     0x1b,     0x27,     0x3,     0x5,     0x3,     0x9,     0x8d,
    0x4b,     0x1b,     0x5,     0x35,     0x3f,     0x63,     0x11,     0x39,
    0x9,     0x27,     0x59,     0x21,     0x1b,     0x3,     0x21,     0x2d,
    0x71,     0x1d,     0x4b,     0x9,     0x47,     0x7d,     0x47,     0x95,
    0x11,     0x63,     0x7b,     0x3,     0x27,     0x69,     0x3,     0x1b,
    0x1b,     0x9,     0x27,     0xa3,     0x65,     0x2b,     0x2b,     0x5f,
    0x1d,     0x47,     0x4b,     0x35,     0x65,     0x5f,     0x1d,     0xaf,
    0x11,     0xd7,     0x95,     0x21,     0x107,     0x65,     0xa3,     0x3f,
    0x69,     0x2d,     0xed,     0x65,     0x5,     0x63,     0x77,     0x6f,
    0x41,     0x99,     0x4b,     0x65,     0xc3,     0x69,     0xbd,     0x1b,
    0x11,     0x63,     0xaf,     0x53,     0x35,     0x53,     0x95,     0x39,
    0x2d,     0x2d,     0xaf,     0x17,     0x27,     0x65,     0x101,     0x1b,
    0x123,     0x47,     0x5,     0x7d,     0xaf,     0x95,     0x3,     0x87,
    0x21,     0x9,     0xf3,     0x77,     0x6f,     0xa3,     0x59,     0x2d,
    0x13d,     0x16d,     0xaf,     0x53,     0x1ab,     0xf3,     0x2d,     0x95,
    0x63,     0x2d,     0x3f,     0xa9,     0x2fb,     0x35,     0x9,     0x4d,
    0x3,     0xe1,     0xb1,     0x69,     0x65,     0x137,     0x7b,     0x2d,
    0x4d,     0xe7,     0xc9,     0x1ef,     0x25b,     0x63,     0x41,     0x5f,
    0x161,     0x4d,     0x3f,     0x3,     0x125,     0x7d,     0x41,     0xbd,
    0x2d,     0x185,     0x17,     0x9,     0xc3,     0xf3,     0x191,     0x15d,
    0x10b,     0x19d,     0xe1,     0x65,     0x65,     0x1c1,     0xbb,     0x87,
    0x1f7,     0x1d,     0xb7,     0x9,     0x1ef,     0x69,     0xed,     0x2d,
    0x4d,     0xd1,     0x183,     0x35,     0x225,     0xaf,     0x243,     0x1cd,
    0x2d,     0x81,     0x26b,     0x99,     0x65,     0x2b,     0x69,     0x8b,
    0x71,     0xf5,     0xf5,     0x81,     0x137,     0x35,     0x35,     0x1b5,
    0x16d,     0xf5,     0x7b,     0x107,     0x267,     0xbd,     0x95,     0xf5,
    0xbd,     0x1cb,     0x1cd,     0x21,     0x93,     0x27,     0x3f,     0x129,
    0x179,     0x173,     0x123,     0x167,     0x53,     0x1a7,     0x215,     0x13d,
    0x93,     0x6f,     0x95,     0x7d,     0x3f,     0x87,     0x2d,     0x425,
};

}  // namespace stego::gf2
