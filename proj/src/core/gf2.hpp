#pragma once

#include <cstdint>
#include <vector>

namespace stego::gf2 {

// Dense polynomial over GF(2), bit j of word j/64 = coefficient of x^j.
using Poly = std::vector<std::uint64_t>;

std::size_t degree(const Poly& p);  // -1 -> returns SIZE_MAX for zero poly
bool is_zero(const Poly& p);

// Carry-less 64x64 -> 128 bit multiply (hi, lo).
struct U128 {
    std::uint64_t lo, hi;
};
U128 clmul64(std::uint64_t a, std::uint64_t b);

// Binary field GF(2^r) with modulus x^r + tail, tail a 64-bit polynomial
// with constant term 1. Elements are little-endian bit vectors of
// word_count() words; bits at positions >= r are always zero.
class Field {
public:
    Field(unsigned r, std::uint64_t tail);

    unsigned degree() const { return r_; }
    std::uint64_t modulus_tail() const { return tail_; }
    std::size_t word_count() const { return words_; }

    using Elem = std::vector<std::uint64_t>;

    Elem zero() const { return Elem(words_, 0); }
    Elem one() const;
    Elem x() const;  // the polynomial x (requires r >= 2)

    Elem mul(const Elem& a, const Elem& b) const;
    Elem sqr(const Elem& a) const;
    Elem pow(Elem base, std::uint64_t e) const;

    // XOR-fold of (a AND b); the standard bilinear form on GF(2)^r.
    static bool dot(const Elem& a, const Elem& b);

private:
    void reduce(Poly& prod) const;  // in place, 2*words_ -> words_

    unsigned r_;
    std::uint64_t tail_;
    std::size_t words_;
};

// Deterministic modulus choice: the smallest odd 64-bit tail making
// x^r + tail irreducible over GF(2). Values for r <= 256 come from the
// shipped table; larger degrees are computed on demand and memoized.
std::uint64_t min_irreducible_tail(unsigned r);

// Scan from scratch, ignoring the table; the table's own ground truth.
std::uint64_t scan_min_irreducible_tail(unsigned r);

bool is_irreducible(unsigned r, std::uint64_t tail);

// Shipped table, index r in [1, 256].
extern const std::uint64_t kMinTailTable[257];

}  // namespace stego::gf2
