#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bits.hpp"
#include "error.hpp"
#include "gf2.hpp"
#include "rng.hpp"

namespace stego {

// Parameters of the keyed Boolean function family over positions
// (i, sigma) with i in 1..lambda and sigma a symbol rank; the flattened
// position index is (i-1)*sigma_size + rank.
//
// The family is the powering generator: a seed is a pair (a, b) of
// GF(2^r) elements and the bit at position j is <a^j, b> over GF(2)^r.
// Restricted to any t positions, the seed distribution is within L1
// distance epsilon of uniform once r >= log2(m) + t/2 + log2(1/epsilon);
// measure_bias checks that exhaustively on small instances.
struct FamilyParams {
    std::uint64_t lambda = 0;      // block count
    std::uint64_t sigma_size = 0;  // symbols per block
    std::uint64_t independence = 0;  // t
    double epsilon = 0.0;            // bias budget

    std::uint64_t domain_size() const { return lambda * sigma_size; }
    double domain_bits() const;  // log2(domain_size)

    unsigned field_degree() const;  // r
    std::uint64_t seed_bits() const { return 2ull * field_degree(); }

    void validate() const;
    bool operator==(const FamilyParams& o) const = default;
};

class KeyedFunction {
public:
    static KeyedFunction keygen(const FamilyParams& params, Rng& rng);
    static KeyedFunction from_seed(const FamilyParams& params, BitVec seed);

    const FamilyParams& params() const { return params_; }
    const BitVec& seed() const { return seed_; }
    const gf2::Field& field() const { return *field_; }

    // Bit at block i (1-based), symbol rank; errors on out-of-range input.
    bool eval(std::uint64_t i, std::uint64_t rank) const;

    // Bit at flat position j; O(log j) field multiplications.
    bool eval_position(std::uint64_t j) const;

    // All domain_size() bits in position order; guarded against large m.
    BitVec materialize() const;

    const gf2::Field::Elem& elem_a() const { return a_; }
    const gf2::Field::Elem& elem_b() const { return b_; }

private:
    KeyedFunction(FamilyParams params, BitVec seed);

    FamilyParams params_;
    BitVec seed_;
    std::shared_ptr<const gf2::Field> field_;
    gf2::Field::Elem a_, b_;
};

// Sequential evaluator for encode/decode loops: visits blocks in
// non-decreasing order and amortizes each block step to one field
// multiplication instead of a fresh exponentiation.
class FamilyCursor {
public:
    explicit FamilyCursor(const KeyedFunction& f);

    // Move to block i (1-based); i must not decrease across calls.
    void seek_block(std::uint64_t i);
    bool eval(std::uint64_t rank);

private:
    const KeyedFunction* f_;
    std::vector<gf2::Field::Elem> pow_rank_;  // a^0 .. a^sigma_size
    gf2::Field::Elem block_base_;             // a^{(i-1)*sigma_size}
    gf2::Field::Elem scratch_;
    std::uint64_t block_ = 1;
};

// Exhaustive Eq.-style bias measurement: enumerates every seed and every
// t-subset of positions, returning the maximum over subsets of
// sum_alpha |Pr[bits = alpha] - 2^-t|. Guarded to m <= 16, t <= 4,
// seed_bits <= 24.
struct BiasReport {
    double max_l1 = 0.0;
    std::vector<std::uint64_t> worst_subset;  // flat positions
};
BiasReport measure_bias(const FamilyParams& params);

// Histogram of materialized m-bit strings over all 2^kappa seeds; shared
// by measure_bias and the adaptive-adversary check. Index = bit string
// as integer (position 0 = LSB).
std::vector<std::uint64_t> seed_string_histogram(const FamilyParams& params);

// Seed-cost accounting for one family instance next to the two reference
// expressions used in the cost report.
struct KeyCostReport {
    std::uint64_t kappa = 0;         // implemented seed length, 2r
    unsigned field_degree = 0;       // r
    double family_formula_bits = 0;  // 2*(lambda + log2(1/eps) + log2log2log2 sigma)
    double prf_baseline_bits = 0;    // lambda * k * (log2 sigma + log2 lambda), k = log2(1/eps)
};
KeyCostReport key_cost(const FamilyParams& params);

}  // namespace stego
