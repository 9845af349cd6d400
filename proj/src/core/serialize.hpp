#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "error.hpp"

namespace stego::wire {

// Little-endian primitive packing shared by the binary file formats.

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

inline void put_bytes(std::vector<std::uint8_t>& out, const std::uint8_t* p, std::size_t n) {
    out.insert(out.end(), p, p + n);
}

inline void need(std::size_t len, std::size_t off, std::size_t n) {
    if (off + n > len) fail(Errc::bad_format, "truncated binary record");
}

inline std::uint8_t get_u8(const std::uint8_t* d, std::size_t len, std::size_t& off) {
    need(len, off, 1);
    return d[off++];
}

inline std::uint32_t get_u32(const std::uint8_t* d, std::size_t len, std::size_t& off) {
    need(len, off, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(d[off + i]) << (8 * i);
    off += 4;
    return v;
}

inline std::uint64_t get_u64(const std::uint8_t* d, std::size_t len, std::size_t& off) {
    need(len, off, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(d[off + i]) << (8 * i);
    off += 8;
    return v;
}

inline double get_f64(const std::uint8_t* d, std::size_t len, std::size_t& off) {
    const std::uint64_t bits = get_u64(d, len, off);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace stego::wire
