#include "gf2.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <stdexcept>

#if defined(__PCLMUL__)
#include <wmmintrin.h>
#include <emmintrin.h>
#endif

namespace stego::gf2 {

std::size_t degree(const Poly& p) {
    for (std::size_t i = p.size(); i-- > 0;) {
        if (p[i] != 0) return i * 64 + (63 - static_cast<std::size_t>(std::countl_zero(p[i])));
    }
    return SIZE_MAX;
}

bool is_zero(const Poly& p) {
    return std::all_of(p.begin(), p.end(), [](std::uint64_t w) { return w == 0; });
}

#if defined(__PCLMUL__)

U128 clmul64(std::uint64_t a, std::uint64_t b) {
    const __m128i va = _mm_set_epi64x(0, static_cast<long long>(a));
    const __m128i vb = _mm_set_epi64x(0, static_cast<long long>(b));
    const __m128i p = _mm_clmulepi64_si128(va, vb, 0x00);
    U128 out;
    out.lo = static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
    out.hi = static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_unpackhi_epi64(p, p)));
    return out;
}

#else

// Software fallback, iterating over the set bits of b.
U128 clmul64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t lo = 0, hi = 0;
    while (b != 0) {
        const int k = std::countr_zero(b);
        b &= b - 1;
        lo ^= a << k;
        if (k != 0) hi ^= a >> (64 - k);
    }
    return {lo, hi};
}

#endif

Field::Field(unsigned r, std::uint64_t tail) : r_(r), tail_(tail), words_((r + 63) / 64) {
    if (r < 1) throw std::invalid_argument("field degree must be >= 1");
    if ((tail & 1) == 0) throw std::invalid_argument("modulus tail must have constant term 1");
    if (r < 64 && (tail >> r) != 0) throw std::invalid_argument("modulus tail degree must be < r");
}

Field::Elem Field::one() const {
    Elem e(words_, 0);
    e[0] = 1;
    return e;
}

Field::Elem Field::x() const {
    if (r_ < 2) throw std::invalid_argument("x is not a field element for r < 2");
    Elem e(words_, 0);
    e[0] = 2;
    return e;
}

void Field::reduce(Poly& prod) const {
    // Fold bits at positions >= r down using x^r == tail. deg(tail) < 64,
    // so each pass shrinks the overflow by about a word and two or three
    // passes suffice.
    const std::size_t top_word = r_ / 64;
    const unsigned top_bit = r_ % 64;
    thread_local std::vector<std::uint64_t> hi;
    for (;;) {
        hi.assign(prod.size() - top_word, 0);
        bool any = false;
        for (std::size_t i = top_word; i < prod.size(); ++i) {
            std::uint64_t w;
            if (top_bit == 0) {
                w = prod[i];
            } else {
                w = prod[i] >> top_bit;
                if (i + 1 < prod.size()) w |= prod[i + 1] << (64 - top_bit);
            }
            hi[i - top_word] = w;
            any = any || (w != 0);
        }
        if (!any) break;
        if (top_bit == 0) {
            for (std::size_t i = top_word; i < prod.size(); ++i) prod[i] = 0;
        } else {
            prod[top_word] &= (std::uint64_t{1} << top_bit) - 1;
            for (std::size_t i = top_word + 1; i < prod.size(); ++i) prod[i] = 0;
        }
        for (std::size_t i = 0; i < hi.size(); ++i) {
            if (hi[i] == 0) continue;
            const U128 p = clmul64(hi[i], tail_);
            prod[i] ^= p.lo;
            if (p.hi != 0) prod[i + 1] ^= p.hi;
        }
    }
    prod.resize(words_);
}

Field::Elem Field::mul(const Elem& a, const Elem& b) const {
    thread_local Poly prod;
    prod.assign(2 * words_ + 1, 0);
    for (std::size_t i = 0; i < words_; ++i) {
        const std::uint64_t ai = a[i];
        if (ai == 0) continue;
        for (std::size_t j = 0; j < words_; ++j) {
            if (b[j] == 0) continue;
            const U128 p = clmul64(ai, b[j]);
            prod[i + j] ^= p.lo;
            prod[i + j + 1] ^= p.hi;
        }
    }
    reduce(prod);
    return Elem(prod.begin(), prod.end());
}

Field::Elem Field::sqr(const Elem& a) const {
    thread_local Poly prod;
    prod.assign(2 * words_ + 1, 0);
    for (std::size_t i = 0; i < words_; ++i) {
        if (a[i] == 0) continue;
        const U128 p = clmul64(a[i], a[i]);
        prod[2 * i] ^= p.lo;
        prod[2 * i + 1] ^= p.hi;
    }
    reduce(prod);
    return Elem(prod.begin(), prod.end());
}

Field::Elem Field::pow(Elem base, std::uint64_t e) const {
    Elem acc = one();
    while (e != 0) {
        if (e & 1) acc = mul(acc, base);
        e >>= 1;
        if (e != 0) base = sqr(base);
    }
    return acc;
}

bool Field::dot(const Elem& a, const Elem& b) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc ^= a[i] & b[i];
    return std::popcount(acc) & 1;
}

namespace {

Poly poly_from_tail(unsigned r, std::uint64_t tail) {
    Poly f((r / 64) + 1, 0);
    f[0] = tail;
    f[r / 64] |= std::uint64_t{1} << (r % 64);
    return f;
}

void poly_xor_shifted(Poly& a, const Poly& b, std::size_t shift) {
    const std::size_t word_shift = shift / 64;
    const unsigned bit_shift = shift % 64;
    if (a.size() < b.size() + word_shift + 1) a.resize(b.size() + word_shift + 1, 0);
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == 0) continue;
        a[i + word_shift] ^= b[i] << bit_shift;
        if (bit_shift != 0) a[i + word_shift + 1] ^= b[i] >> (64 - bit_shift);
    }
}

Poly poly_gcd(Poly a, Poly b) {
    for (;;) {
        std::size_t da = degree(a), db = degree(b);
        if (db == SIZE_MAX) return a;
        if (da == SIZE_MAX || da < db) {
            std::swap(a, b);
            std::swap(da, db);
        }
        if (db == SIZE_MAX) return a;
        poly_xor_shifted(a, b, da - db);
    }
}

bool poly_is_one(const Poly& p) { return degree(p) == 0; }

std::vector<unsigned> prime_divisors(unsigned n) {
    std::vector<unsigned> out;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace

bool is_irreducible(unsigned r, std::uint64_t tail) {
    if ((tail & 1) == 0) return false;  // divisible by x
    if (r < 64 && (tail >> r) != 0) return false;
    if (r == 1) return true;  // x + 1
    Field fld(r, tail);
    const Poly f = poly_from_tail(r, tail);
    const auto xelem = fld.x();

    // f is irreducible iff x^(2^r) == x (mod f) and, for each prime q | r,
    // gcd(x^(2^(r/q)) - x, f) = 1. Extra gcd checks at small k reject
    // candidates with low-degree factors early; any k < r is a valid check
    // because an irreducible f of degree r has no factor of degree <= k.
    std::vector<unsigned> checkpoints;
    for (unsigned q : prime_divisors(r)) checkpoints.push_back(r / q);
    for (unsigned k = 1; k <= std::min(8u, r - 1); ++k) checkpoints.push_back(k);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

    Field::Elem t = xelem;
    std::size_t cp = 0;
    for (unsigned k = 1; k <= r; ++k) {
        t = fld.sqr(t);
        while (cp < checkpoints.size() && checkpoints[cp] < k) ++cp;
        if (cp < checkpoints.size() && checkpoints[cp] == k && k < r) {
            Poly diff = t;
            diff[0] ^= 2;  // t + x
            if (is_zero(diff)) return false;  // all factor degrees divide k < r
            if (!poly_is_one(poly_gcd(diff, f))) return false;
        }
    }
    return t == xelem;
}

std::uint64_t scan_min_irreducible_tail(unsigned r) {
    for (std::uint64_t tail = 1;; tail += 2) {
        if (r < 64 && (tail >> r) != 0)
            throw std::runtime_error("irreducible tail scan exceeded degree bound");
        if (tail == ~std::uint64_t{0})
            throw std::runtime_error("irreducible tail scan exhausted 64 bits");
        if (is_irreducible(r, tail)) return tail;
    }
}

std::uint64_t min_irreducible_tail(unsigned r) {
    if (r == 0) throw std::invalid_argument("degree must be positive");
    if (r <= 256) return kMinTailTable[r];
    static std::mutex mu;
    static std::map<unsigned, std::uint64_t> cache;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(r);
        if (it != cache.end()) return it->second;
    }
    const std::uint64_t tail = scan_min_irreducible_tail(r);
    std::lock_guard<std::mutex> lk(mu);
    cache.emplace(r, tail);
    return tail;
}

}  // namespace stego::gf2
