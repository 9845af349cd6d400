#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace stego {

// Fixed-length bit string. Bit i lives at word i/64, position i%64
// (little-endian within words); unused tail bits are kept zero so that
// whole-word comparisons and parity work without masking.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    static BitVec random(std::size_t nbits, Rng& rng) {
        BitVec v(nbits);
        for (auto& w : v.words_) w = rng();
        v.clear_tail();
        return v;
    }

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool b) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (b)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    std::size_t count_ones() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool operator==(const BitVec& o) const {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    BitVec& operator^=(const BitVec& o) {
        if (o.nbits_ != nbits_) throw std::invalid_argument("BitVec xor: length mismatch");
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
        return *this;
    }

    // Serialize to bytes, LSB-first within each byte.
    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> out((nbits_ + 7) / 8, 0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const std::size_t w = i / 8, sh = (i % 8) * 8;
            if (w < words_.size()) out[i] = static_cast<std::uint8_t>(words_[w] >> sh);
        }
        return out;
    }

    static BitVec from_bytes(const std::uint8_t* data, std::size_t nbits) {
        BitVec v(nbits);
        const std::size_t nbytes = (nbits + 7) / 8;
        for (std::size_t i = 0; i < nbytes; ++i) {
            const std::size_t w = i / 8, sh = (i % 8) * 8;
            v.words_[w] |= static_cast<std::uint64_t>(data[i]) << sh;
        }
        v.clear_tail();
        return v;
    }

    void clear_tail() {
        const std::size_t rem = nbits_ & 63;
        if (rem != 0 && !words_.empty()) words_.back() &= (~std::uint64_t{0}) >> (64 - rem);
    }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace stego
