#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bits.hpp"
#include "error.hpp"

namespace stego {

// Capacity of a crossover-p binary symmetric channel, 1 - H(p).
double bsc_capacity(double p);

enum class CodeScheme : std::uint32_t {
    repetition_rs = 0,   // per-bit repetition inner, Reed-Solomon outer
    random_linear_rs = 1,  // ML-decoded fixed random linear inner, RS outer
};

// A concrete (n, lambda, p, eps_enc) code instance. Messages are n bits;
// codewords lambda bits. decode() is total: when the outer decoder cannot
// produce a consistent codeword it falls back to the raw data symbols, so
// a result always comes back and failures are purely probabilistic.
struct CodeSpec {
    std::uint64_t n = 0;       // message bits
    std::uint64_t lambda = 0;  // codeword bits
    double p = 0.0;            // design crossover probability
    double epsilon_enc = 0.0;  // target decode-failure probability
    CodeScheme scheme = CodeScheme::repetition_rs;

    bool identity = false;     // p == 0 degenerate case: lambda == n
    std::uint32_t inner_rho = 1;   // repetition factor (repetition scheme)
    std::uint32_t inner_nu = 8;    // inner block bits (random-linear scheme)
    std::uint32_t outer_n = 0;     // RS codeword symbols
    std::uint32_t outer_k = 0;     // RS data symbols
    double failure_bound = 0.0;    // analytic bound at design p

    double rate() const { return static_cast<double>(n) / static_cast<double>(lambda); }
    double capacity() const { return bsc_capacity(p); }

    void serialize(std::vector<std::uint8_t>& out) const;
    static CodeSpec deserialize(const std::uint8_t* data, std::size_t len, std::size_t& off);
    bool operator==(const CodeSpec& o) const = default;
};

struct BuildOptions {
    std::uint64_t lambda_cap = std::uint64_t{1} << 22;
    std::uint32_t rho_cap = 501;
    std::uint32_t inner_nu_min = 16;   // random-linear scheme search range
    std::uint32_t inner_nu_max = 64;   // one machine word per inner block
};

// Chooses inner/outer parameters so that the exact per-symbol
// error/erasure tail DP puts the decode-failure bound at crossover p
// below eps_enc, minimizing codeword length. Throws infeasible_parameters
// when no configuration within the caps reaches the target.
CodeSpec build_code(std::uint64_t n, double p, double eps_enc,
                    CodeScheme scheme = CodeScheme::repetition_rs,
                    const BuildOptions& opts = {});

BitVec encode(const CodeSpec& spec, const BitVec& message);
BitVec decode(const CodeSpec& spec, const BitVec& received);

// Analytic decode-failure bound of a fully-specified instance at crossover
// probability q (q <= spec.p for the contract regime). Exposed for tests.
double analytic_failure_bound(const CodeSpec& spec, double q);

// --- Reed-Solomon over GF(2^8), errors-and-erasures ---
// Exposed for direct unit testing; byte-oriented.
namespace rs {

// Encode k data bytes into n codeword bytes (data first, parity appended).
std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& data, unsigned n, unsigned k);

// Decode n received bytes; erasure positions listed by index. Returns the
// k data bytes; best-effort (first k received bytes) when unrecoverable.
std::vector<std::uint8_t> decode(std::vector<std::uint8_t> received, unsigned n, unsigned k,
                                 const std::vector<unsigned>& erasures);

}  // namespace rs

}  // namespace stego
