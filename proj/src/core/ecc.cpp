#include "ecc.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>

#include "rng.hpp"
#include "serialize.hpp"

namespace stego {

double bsc_capacity(double p) {
    if (p < 0.0 || p > 0.5 + 1e-12) fail(Errc::invalid_argument, "crossover must lie in [0, 1/2]");
    p = std::min(p, 0.5);
    if (p == 0.0) return 1.0;
    const double q = 1.0 - p;
    const double h = -p * std::log2(p) - q * std::log2(q);
    return 1.0 - h;
}

// ---------------------------------------------------------------- GF(2^8)

namespace gf256 {

constexpr unsigned kPoly = 0x11d;

struct Tables {
    std::array<std::uint8_t, 512> exp;
    std::array<std::uint8_t, 256> log;
    Tables() {
        unsigned x = 1;
        for (unsigned i = 0; i < 255; ++i) {
            exp[i] = static_cast<std::uint8_t>(x);
            log[x] = static_cast<std::uint8_t>(i);
            x <<= 1;
            if (x & 0x100) x ^= kPoly;
        }
        for (unsigned i = 255; i < 512; ++i) exp[i] = exp[i - 255];
        log[0] = 0;
    }
};

inline const Tables& tables() {
    static const Tables t;
    return t;
}

inline std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    const auto& t = tables();
    return t.exp[t.log[a] + t.log[b]];
}

inline std::uint8_t div(std::uint8_t a, std::uint8_t b) {
    if (b == 0) fail(Errc::invalid_argument, "GF(2^8) division by zero");
    if (a == 0) return 0;
    const auto& t = tables();
    return t.exp[(t.log[a] + 255 - t.log[b]) % 255];
}

inline std::uint8_t pow_alpha(unsigned e) { return tables().exp[e % 255]; }

inline std::uint8_t inv(std::uint8_t a) { return div(1, a); }

using Polynom = std::vector<std::uint8_t>;  // poly[i] = coefficient of x^i

inline Polynom poly_mul(const Polynom& a, const Polynom& b) {
    Polynom out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] ^= mul(a[i], b[j]);
    }
    return out;
}

inline std::uint8_t poly_eval(const Polynom& p, std::uint8_t x) {
    std::uint8_t acc = 0;
    for (std::size_t i = p.size(); i-- > 0;) acc = static_cast<std::uint8_t>(mul(acc, x) ^ p[i]);
    return acc;
}

}  // namespace gf256

namespace rs {

namespace {

// Generator polynomial with roots alpha^1 .. alpha^parity.
gf256::Polynom generator(unsigned parity) {
    gf256::Polynom g{1};
    for (unsigned i = 1; i <= parity; ++i) {
        g = gf256::poly_mul(g, gf256::Polynom{gf256::pow_alpha(i), 1});
    }
    return g;
}

const gf256::Polynom& cached_generator(unsigned parity) {
    static std::mutex mu;
    static std::map<unsigned, gf256::Polynom> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(parity);
    if (it == cache.end()) it = cache.emplace(parity, generator(parity)).first;
    return it->second;
}

}  // namespace

std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& data, unsigned n, unsigned k) {
    if (n > 255 || k == 0 || k > n) fail(Errc::invalid_argument, "bad RS parameters");
    if (data.size() != k) fail(Errc::length_mismatch, "RS data length mismatch");
    const unsigned parity = n - k;
    std::vector<std::uint8_t> cw(data);
    cw.resize(n, 0);
    if (parity == 0) return cw;
    const auto& g = cached_generator(parity);
    // Synthetic division of data(x) * x^parity by g(x); remainder is parity.
    std::vector<std::uint8_t> rem(parity, 0);
    for (unsigned i = 0; i < k; ++i) {
        const std::uint8_t fb = static_cast<std::uint8_t>(data[i] ^ rem[0]);
        for (unsigned j = 0; j + 1 < parity; ++j)
            rem[j] = static_cast<std::uint8_t>(rem[j + 1] ^ gf256::mul(g[parity - 1 - j], fb));
        rem[parity - 1] = gf256::mul(g[0], fb);
    }
    std::copy(rem.begin(), rem.end(), cw.begin() + k);
    return cw;
}

std::vector<std::uint8_t> decode(std::vector<std::uint8_t> received, unsigned n, unsigned k,
                                 const std::vector<unsigned>& erasures) {
    if (n > 255 || k == 0 || k > n) fail(Errc::invalid_argument, "bad RS parameters");
    if (received.size() != n) fail(Errc::length_mismatch, "RS received length mismatch");
    const unsigned parity = n - k;

    auto fallback = [&]() {
        return std::vector<std::uint8_t>(received.begin(), received.begin() + k);
    };
    if (parity == 0) return fallback();
    if (erasures.size() > parity) return fallback();

    // Syndromes S_i = R(alpha^(i+1)); byte j carries the coefficient of
    // x^(n-1-j).
    gf256::Polynom rpoly(n);
    for (unsigned j = 0; j < n; ++j) rpoly[n - 1 - j] = received[j];
    std::vector<std::uint8_t> synd(parity);
    bool all_zero = true;
    for (unsigned i = 0; i < parity; ++i) {
        synd[i] = gf256::poly_eval(rpoly, gf256::pow_alpha(i + 1));
        all_zero = all_zero && synd[i] == 0;
    }
    if (all_zero) return fallback();  // received is a codeword

    // Erasure locator Gamma(x) = prod (1 - x alpha^{pos}).
    gf256::Polynom gamma{1};
    for (unsigned idx : erasures) {
        if (idx >= n) fail(Errc::invalid_argument, "erasure index out of range");
        const std::uint8_t xp = gf256::pow_alpha(n - 1 - idx);
        gamma = gf256::poly_mul(gamma, gf256::Polynom{1, xp});
    }

    // Forney syndromes T = S(x) * Gamma(x) mod x^parity.
    gf256::Polynom spoly(synd.begin(), synd.end());
    gf256::Polynom t = gf256::poly_mul(spoly, gamma);
    t.resize(parity, 0);

    // Classic Berlekamp-Massey on the Forney syndromes past the erasure
    // prefix; it recovers the error-only locator.
    const unsigned e_count = static_cast<unsigned>(erasures.size());
    const std::vector<std::uint8_t> u(t.begin() + e_count, t.end());
    gf256::Polynom lambda{1}, prev{1};
    unsigned L = 0, mshift = 1;
    std::uint8_t bcoef = 1;
    auto scale_shift_xor = [](gf256::Polynom& dst, const gf256::Polynom& src, std::uint8_t scale,
                              unsigned shift) {
        if (dst.size() < src.size() + shift) dst.resize(src.size() + shift, 0);
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i + shift] ^= gf256::mul(src[i], scale);
    };
    for (unsigned it = 0; it < u.size(); ++it) {
        std::uint8_t delta = u[it];
        for (unsigned i = 1; i <= L && i < lambda.size(); ++i)
            if (it >= i) delta ^= gf256::mul(lambda[i], u[it - i]);
        if (delta == 0) {
            ++mshift;
        } else if (2 * L <= it) {
            gf256::Polynom tmp = lambda;
            scale_shift_xor(lambda, prev, gf256::div(delta, bcoef), mshift);
            prev = tmp;
            bcoef = delta;
            L = it + 1 - L;
            mshift = 1;
        } else {
            scale_shift_xor(lambda, prev, gf256::div(delta, bcoef), mshift);
            ++mshift;
        }
    }
    while (!lambda.empty() && lambda.back() == 0) lambda.pop_back();
    if (lambda.empty()) return fallback();
    if (2 * L > static_cast<unsigned>(u.size())) return fallback();

    // Errata locator Psi = Lambda * Gamma; roots give errata positions.
    gf256::Polynom psi = gf256::poly_mul(lambda, gamma);
    if (2 * (psi.size() - 1) > parity + e_count) return fallback();

    std::vector<unsigned> positions;  // as powers of x
    for (unsigned pos = 0; pos < n; ++pos) {
        const std::uint8_t xinv = gf256::pow_alpha(255 - (pos % 255));
        if (gf256::poly_eval(psi, xinv) == 0) positions.push_back(pos);
    }
    if (positions.size() != psi.size() - 1) return fallback();

    // Forney magnitudes with Omega = S * Psi mod x^parity.
    gf256::Polynom omega = gf256::poly_mul(spoly, psi);
    omega.resize(parity, 0);
    gf256::Polynom psi_deriv;  // formal derivative: odd-degree terms
    for (std::size_t i = 1; i < psi.size(); i += 2) {
        psi_deriv.resize(std::max(psi_deriv.size(), i), 0);
        psi_deriv[i - 1] = psi[i];
    }
    if (psi_deriv.empty()) return fallback();

    for (unsigned pos : positions) {
        const std::uint8_t xinv = gf256::pow_alpha(255 - (pos % 255));
        const std::uint8_t denom = gf256::poly_eval(psi_deriv, xinv);
        if (denom == 0) return fallback();
        const std::uint8_t mag = gf256::div(gf256::poly_eval(omega, xinv), denom);
        received[n - 1 - pos] ^= mag;
    }

    // Verify the corrected word is a codeword; otherwise fall back.
    for (unsigned j = 0; j < n; ++j) rpoly[n - 1 - j] = received[j];
    for (unsigned i = 0; i < parity; ++i)
        if (gf256::poly_eval(rpoly, gf256::pow_alpha(i + 1)) != 0) return fallback();

    return std::vector<std::uint8_t>(received.begin(), received.begin() + k);
}

}  // namespace rs

// ------------------------------------------------------- inner codes

namespace {

// Deterministic full-rank generator matrix for the random-linear inner
// code; rows are the images of the 8 byte bits.
std::array<std::uint64_t, 8> random_linear_rows(std::uint32_t nu) {
    if (nu < 9 || nu > 64) fail(Errc::invalid_argument, "inner block length out of range");
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(splitmix64(0x1ec0de5eedULL + 0x10000ULL * nu + attempt));
        std::array<std::uint64_t, 8> rows{};
        const std::uint64_t mask = nu == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << nu) - 1);
        for (auto& r : rows) r = rng() & mask;
        // Full rank over GF(2) guarantees distinct codewords.
        std::array<std::uint64_t, 8> m = rows;
        unsigned rank = 0;
        for (unsigned col = 0; col < 64 && rank < 8; ++col) {
            unsigned piv = rank;
            while (piv < 8 && ((m[piv] >> col) & 1) == 0) ++piv;
            if (piv == 8) continue;
            std::swap(m[rank], m[piv]);
            for (unsigned i = 0; i < 8; ++i)
                if (i != rank && ((m[i] >> col) & 1)) m[i] ^= m[rank];
            ++rank;
        }
        if (rank == 8) return rows;
    }
}

std::uint64_t random_linear_codeword(const std::array<std::uint64_t, 8>& rows, std::uint8_t byte) {
    std::uint64_t cw = 0;
    for (unsigned b = 0; b < 8; ++b)
        if ((byte >> b) & 1) cw ^= rows[b];
    return cw;
}

// Exact binomial pmf vector for Bin(n, p).
std::vector<double> binom_pmf(unsigned n, double p) {
    std::vector<double> pmf(n + 1);
    pmf[0] = std::pow(1.0 - p, static_cast<double>(n));
    const double ratio = p / (1.0 - p);
    for (unsigned k = 1; k <= n; ++k)
        pmf[k] = pmf[k - 1] * ratio * (static_cast<double>(n - k + 1) / static_cast<double>(k));
    return pmf;
}

struct SymbolChannel {
    double p_err = 0.0;    // symbol decoded to a wrong value
    double p_erase = 0.0;  // symbol flagged as erasure
};

// Repetition inner decode statistics at crossover q.
SymbolChannel repetition_symbol_channel(std::uint32_t rho, double q) {
    const auto pmf = binom_pmf(rho, q);
    double p_bit_err = 0.0, p_bit_tie = 0.0;
    for (unsigned k = 0; k <= rho; ++k) {
        if (2 * k > rho) p_bit_err += pmf[k];
        if (2 * k == rho) p_bit_tie += pmf[k];
    }
    SymbolChannel out;
    const double clean = 1.0 - p_bit_tie;
    out.p_erase = 1.0 - std::pow(clean, 8.0);
    out.p_err = std::pow(clean, 8.0) - std::pow(1.0 - p_bit_tie - p_bit_err, 8.0);
    return out;
}

// Random-linear inner: union bound over the fixed code's weight spectrum,
// ties counted as full errors (the decoder maps them to erasures, which
// cost the outer code strictly less).
SymbolChannel random_linear_symbol_channel(const std::array<std::uint64_t, 8>& rows,
                                           std::uint32_t nu, double q) {
    double total = 0.0;
    for (unsigned byte = 1; byte < 256; ++byte) {
        const std::uint64_t cw = random_linear_codeword(rows, static_cast<std::uint8_t>(byte));
        const unsigned w = static_cast<unsigned>(std::popcount(cw));
        const auto pmf = binom_pmf(w, q);
        double tail = 0.0;
        for (unsigned k = (w + 1) / 2; k <= w; ++k) tail += pmf[k];
        total += tail;
    }
    (void)nu;
    SymbolChannel out;
    out.p_err = std::min(1.0, total);
    out.p_erase = 0.0;
    return out;
}

// Probability that weighted errata 2E + Z exceed the outer parity budget.
double outer_failure(unsigned outer_n, unsigned outer_k, const SymbolChannel& sym) {
    const unsigned budget = outer_n - outer_k;
    std::vector<double> dp(budget + 2, 0.0);
    dp[0] = 1.0;
    const double ok = std::max(0.0, 1.0 - sym.p_err - sym.p_erase);
    for (unsigned s = 0; s < outer_n; ++s) {
        std::vector<double> next(budget + 2, 0.0);
        for (unsigned b = 0; b <= budget + 1; ++b) {
            if (dp[b] == 0.0) continue;
            next[b] += dp[b] * ok;
            next[std::min<unsigned>(b + 1, budget + 1)] += dp[b] * sym.p_erase;
            next[std::min<unsigned>(b + 2, budget + 1)] += dp[b] * sym.p_err;
        }
        dp = std::move(next);
    }
    return dp[budget + 1];
}

SymbolChannel symbol_channel_for(const CodeSpec& spec, double q) {
    if (spec.scheme == CodeScheme::repetition_rs) return repetition_symbol_channel(spec.inner_rho, q);
    return random_linear_symbol_channel(random_linear_rows(spec.inner_nu), spec.inner_nu, q);
}

}  // namespace

double analytic_failure_bound(const CodeSpec& spec, double q) {
    if (spec.identity) return 1.0 - std::pow(1.0 - q, static_cast<double>(spec.n));
    return outer_failure(spec.outer_n, spec.outer_k, symbol_channel_for(spec, q));
}

CodeSpec build_code(std::uint64_t n, double p, double eps_enc, CodeScheme scheme,
                    const BuildOptions& opts) {
    if (n == 0) fail(Errc::invalid_argument, "message length must be positive");
    if (p < 0.0 || p >= 0.5) fail(Errc::infeasible_parameters, "crossover must lie in [0, 1/2)");
    if (!(eps_enc > 0.0) || !(eps_enc < 1.0))
        fail(Errc::invalid_argument, "target failure probability must lie in (0,1)");

    CodeSpec spec;
    spec.n = n;
    spec.p = p;
    spec.epsilon_enc = eps_enc;
    spec.scheme = scheme;

    if (p == 0.0) {
        spec.identity = true;
        spec.lambda = n;
        spec.inner_rho = 1;
        spec.outer_n = spec.outer_k = 0;
        spec.failure_bound = 0.0;
        return spec;
    }

    const unsigned k_bytes = static_cast<unsigned>((n + 7) / 8);
    if (k_bytes > 255) fail(Errc::infeasible_parameters, "message exceeds one outer codeword");

    std::optional<CodeSpec> best;
    auto consider = [&](std::uint32_t rho, std::uint32_t nu, unsigned outer_n, double bound) {
        const std::uint64_t lambda =
            scheme == CodeScheme::repetition_rs
                ? static_cast<std::uint64_t>(outer_n) * 8 * rho
                : static_cast<std::uint64_t>(outer_n) * nu;
        if (lambda > opts.lambda_cap) return;
        if (best && best->lambda <= lambda) return;
        CodeSpec c = spec;
        c.lambda = lambda;
        c.inner_rho = rho;
        c.inner_nu = nu;
        c.outer_n = outer_n;
        c.outer_k = k_bytes;
        c.failure_bound = bound;
        best = c;
    };

    if (scheme == CodeScheme::repetition_rs) {
        for (unsigned outer_n = k_bytes; outer_n <= 255; ++outer_n) {
            // Minimal odd repetition factor via binary search (the failure
            // bound is decreasing in rho for fixed outer_n), then try the
            // even neighbour, whose ties become cheaper erasures.
            auto bound_at = [&](std::uint32_t rho) {
                return outer_failure(outer_n, k_bytes, repetition_symbol_channel(rho, p));
            };
            std::uint32_t lo = 1, hi = opts.rho_cap | 1u;
            if (bound_at(hi) > eps_enc) continue;
            while (lo < hi) {
                std::uint32_t mid = (lo + hi) / 2;
                if ((mid & 1u) == 0) --mid;  // odd midpoint, rounded down
                if (mid < lo) mid = lo;
                if (bound_at(mid) <= eps_enc)
                    hi = mid;
                else
                    lo = mid + 2;
            }
            const std::uint32_t rho_odd = hi;
            consider(rho_odd, 8, outer_n, bound_at(rho_odd));
            if (rho_odd >= 2) {
                const double b_even = bound_at(rho_odd - 1);
                if (b_even <= eps_enc) consider(rho_odd - 1, 8, outer_n, b_even);
            }
            if (best && static_cast<std::uint64_t>(outer_n + 1) * 8 > best->lambda) break;
        }
    } else {
        for (std::uint32_t nu = opts.inner_nu_min; nu <= opts.inner_nu_max; nu += 8) {
            const auto rows = random_linear_rows(nu);
            const auto sym = random_linear_symbol_channel(rows, nu, p);
            for (unsigned outer_n = k_bytes; outer_n <= 255; ++outer_n) {
                const std::uint64_t lambda = static_cast<std::uint64_t>(outer_n) * nu;
                if (best && best->lambda <= lambda) break;
                const double bound = outer_failure(outer_n, k_bytes, sym);
                if (bound <= eps_enc) {
                    consider(1, nu, outer_n, bound);
                    break;
                }
            }
        }
    }

    if (!best)
        fail(Errc::infeasible_parameters,
             "no code within the length cap reaches the target failure probability");
    return *best;
}

// ------------------------------------------------------- encode / decode

namespace {

std::vector<std::uint8_t> pack_message(const CodeSpec& spec, const BitVec& message) {
    std::vector<std::uint8_t> bytes(spec.outer_k, 0);
    for (std::uint64_t i = 0; i < spec.n; ++i)
        if (message.get(static_cast<std::size_t>(i)))
            bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    return bytes;
}

BitVec unpack_message(const CodeSpec& spec, const std::vector<std::uint8_t>& bytes) {
    BitVec out(static_cast<std::size_t>(spec.n));
    for (std::uint64_t i = 0; i < spec.n; ++i)
        if ((bytes[i / 8] >> (i % 8)) & 1) out.set(static_cast<std::size_t>(i), true);
    return out;
}

}  // namespace

BitVec encode(const CodeSpec& spec, const BitVec& message) {
    if (message.size() != spec.n) fail(Errc::length_mismatch, "message length mismatch");
    if (spec.identity) return message;

    const auto cw = rs::encode(pack_message(spec, message), spec.outer_n, spec.outer_k);
    BitVec out(static_cast<std::size_t>(spec.lambda));
    std::size_t pos = 0;
    if (spec.scheme == CodeScheme::repetition_rs) {
        for (std::uint8_t byte : cw) {
            for (unsigned b = 0; b < 8; ++b) {
                const bool bit = (byte >> b) & 1;
                for (std::uint32_t r = 0; r < spec.inner_rho; ++r) out.set(pos++, bit);
            }
        }
    } else {
        const auto rows = random_linear_rows(spec.inner_nu);
        for (std::uint8_t byte : cw) {
            const std::uint64_t inner = random_linear_codeword(rows, byte);
            for (std::uint32_t b = 0; b < spec.inner_nu; ++b) out.set(pos++, (inner >> b) & 1);
        }
    }
    return out;
}

BitVec decode(const CodeSpec& spec, const BitVec& received) {
    if (received.size() != spec.lambda) fail(Errc::length_mismatch, "codeword length mismatch");
    if (spec.identity) return received;

    std::vector<std::uint8_t> symbols(spec.outer_n, 0);
    std::vector<unsigned> erasures;
    std::size_t pos = 0;
    if (spec.scheme == CodeScheme::repetition_rs) {
        for (unsigned s = 0; s < spec.outer_n; ++s) {
            std::uint8_t byte = 0;
            bool erased = false;
            for (unsigned b = 0; b < 8; ++b) {
                unsigned ones = 0;
                for (std::uint32_t r = 0; r < spec.inner_rho; ++r)
                    ones += received.get(pos++) ? 1 : 0;
                if (2 * ones > spec.inner_rho)
                    byte |= static_cast<std::uint8_t>(1u << b);
                else if (2 * ones == spec.inner_rho)
                    erased = true;  // tie: mark the whole symbol
            }
            symbols[s] = byte;
            if (erased) erasures.push_back(s);
        }
    } else {
        const auto rows = random_linear_rows(spec.inner_nu);
        std::array<std::uint64_t, 256> table;
        for (unsigned byte = 0; byte < 256; ++byte)
            table[byte] = random_linear_codeword(rows, static_cast<std::uint8_t>(byte));
        for (unsigned s = 0; s < spec.outer_n; ++s) {
            std::uint64_t word = 0;
            for (std::uint32_t b = 0; b < spec.inner_nu; ++b)
                if (received.get(pos++)) word |= std::uint64_t{1} << b;
            unsigned best_d = ~0u, best_byte = 0;
            bool tie = false;
            for (unsigned byte = 0; byte < 256; ++byte) {
                const unsigned d = static_cast<unsigned>(std::popcount(word ^ table[byte]));
                if (d < best_d) {
                    best_d = d;
                    best_byte = byte;
                    tie = false;
                } else if (d == best_d) {
                    tie = true;
                }
            }
            symbols[s] = static_cast<std::uint8_t>(best_byte);
            if (tie) erasures.push_back(s);
        }
    }
    return unpack_message(spec, rs::decode(std::move(symbols), spec.outer_n, spec.outer_k, erasures));
}

// ------------------------------------------------------- serialization

void CodeSpec::serialize(std::vector<std::uint8_t>& out) const {
    wire::put_u32(out, static_cast<std::uint32_t>(scheme));
    wire::put_u8(out, identity ? 1 : 0);
    wire::put_u64(out, n);
    wire::put_u64(out, lambda);
    wire::put_f64(out, p);
    wire::put_f64(out, epsilon_enc);
    wire::put_u32(out, inner_rho);
    wire::put_u32(out, inner_nu);
    wire::put_u32(out, outer_n);
    wire::put_u32(out, outer_k);
    wire::put_f64(out, failure_bound);
}

CodeSpec CodeSpec::deserialize(const std::uint8_t* data, std::size_t len, std::size_t& off) {
    CodeSpec s;
    const std::uint32_t scheme_raw = wire::get_u32(data, len, off);
    if (scheme_raw > 1) fail(Errc::bad_format, "unknown code scheme");
    s.scheme = static_cast<CodeScheme>(scheme_raw);
    s.identity = wire::get_u8(data, len, off) != 0;
    s.n = wire::get_u64(data, len, off);
    s.lambda = wire::get_u64(data, len, off);
    s.p = wire::get_f64(data, len, off);
    s.epsilon_enc = wire::get_f64(data, len, off);
    s.inner_rho = wire::get_u32(data, len, off);
    s.inner_nu = wire::get_u32(data, len, off);
    s.outer_n = wire::get_u32(data, len, off);
    s.outer_k = wire::get_u32(data, len, off);
    s.failure_bound = wire::get_f64(data, len, off);
    return s;
}

}  // namespace stego
