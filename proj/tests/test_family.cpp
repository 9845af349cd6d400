#include <doctest.h>

#include <cmath>

#include "family.hpp"

using namespace stego;

TEST_CASE("field degree sizing and seed length") {
    FamilyParams p;
    p.lambda = 1 << 18;  // m = 2^20 with sigma 4
    p.sigma_size = 4;
    p.independence = 64;
    p.epsilon = std::exp2(-40.0);
    // r = ceil(log2 m + t/2 + log2(1/eps)) = 20 + 32 + 40
    CHECK(p.field_degree() == 92);
    CHECK(p.seed_bits() == 184);
    // documented construction overhead: within 2(log2 m + t/2 + log2 1/eps) + 2
    const double formula = 2.0 * (20.0 + 32.0 + 40.0);
    CHECK(static_cast<double>(p.seed_bits()) <= formula + 2.0);
}

TEST_CASE("doubling 1/eps or raising t by two adds exactly two seed bits") {
    FamilyParams p;
    p.lambda = 1000;
    p.sigma_size = 4;
    p.independence = 64;
    p.epsilon = std::exp2(-20.0);
    const auto base = p.seed_bits();

    FamilyParams tighter = p;
    tighter.epsilon = p.epsilon / 2.0;
    CHECK(tighter.seed_bits() == base + 2);

    FamilyParams wider = p;
    wider.independence = p.independence + 2;
    CHECK(wider.seed_bits() == base + 2);
}

TEST_CASE("keygen is reproducible and uses fresh randomness") {
    FamilyParams p;
    p.lambda = 16;
    p.sigma_size = 4;
    p.independence = 8;
    p.epsilon = 0.125;
    Rng r1 = make_rng(5), r2 = make_rng(5), r3 = make_rng(6);
    const auto f1 = KeyedFunction::keygen(p, r1);
    const auto f2 = KeyedFunction::keygen(p, r2);
    const auto f3 = KeyedFunction::keygen(p, r3);
    CHECK(f1.seed() == f2.seed());
    CHECK(f1.seed() != f3.seed());
}

TEST_CASE("eval is pure and respects the position embedding") {
    FamilyParams p;
    p.lambda = 8;
    p.sigma_size = 4;
    p.independence = 4;
    p.epsilon = 0.25;
    Rng rng = make_rng(9);
    const auto f = KeyedFunction::keygen(p, rng);
    for (std::uint64_t i = 1; i <= p.lambda; ++i) {
        for (std::uint64_t c = 0; c < p.sigma_size; ++c) {
            const bool b1 = f.eval(i, c);
            const bool b2 = f.eval(i, c);
            CHECK(b1 == b2);
            CHECK(b1 == f.eval_position((i - 1) * p.sigma_size + c));
        }
    }
    CHECK_THROWS_AS(f.eval(0, 0), Error);
    CHECK_THROWS_AS(f.eval(p.lambda + 1, 0), Error);
    CHECK_THROWS_AS(f.eval(1, p.sigma_size), Error);
}

TEST_CASE("lazy evaluation agrees with materialized bits") {
    FamilyParams p;
    p.lambda = 4;
    p.sigma_size = 4;
    p.independence = 4;
    p.epsilon = 0.25;
    Rng rng = make_rng(21);
    for (int key = 0; key < 8; ++key) {
        const auto f = KeyedFunction::keygen(p, rng);
        const auto bits = f.materialize();
        for (std::uint64_t j = 0; j < p.domain_size(); ++j)
            CHECK(f.eval_position(j) == bits.get(static_cast<std::size_t>(j)));
    }
}

TEST_CASE("cursor walk matches direct evaluation") {
    FamilyParams p;
    p.lambda = 50;
    p.sigma_size = 6;
    p.independence = 10;
    p.epsilon = 0.125;
    Rng rng = make_rng(31);
    const auto f = KeyedFunction::keygen(p, rng);
    FamilyCursor cur(f);
    Rng pick = make_rng(32);
    for (std::uint64_t i = 1; i <= p.lambda; ++i) {
        cur.seek_block(i);
        for (int rep = 0; rep < 2; ++rep) {
            const std::uint64_t c = uniform_below(pick, p.sigma_size);
            CHECK(cur.eval(c) == f.eval(i, c));
        }
    }
    CHECK_THROWS_AS(cur.seek_block(1), Error);  // backwards
}

TEST_CASE("first and last positions evaluate in a large domain") {
    FamilyParams p;
    p.lambda = 1 << 20;
    p.sigma_size = 16;
    p.independence = 8;
    p.epsilon = std::exp2(-10.0);
    Rng rng = make_rng(3);
    const auto f = KeyedFunction::keygen(p, rng);
    (void)f.eval(1, 0);
    (void)f.eval(p.lambda, p.sigma_size - 1);
}

TEST_CASE("ideal family and point-mass family bias reference values") {
    // The family of all 2^m functions has zero restriction bias; emulate by
    // histogramming every string once.
    const unsigned m = 4, t = 2;
    std::vector<std::uint64_t> hist(16, 1);
    // direct L1 over subsets for the all-strings histogram
    for (unsigned a = 0; a < m; ++a) {
        for (unsigned b = a + 1; b < m; ++b) {
            std::uint64_t counts[4] = {0, 0, 0, 0};
            for (std::uint64_t str = 0; str < 16; ++str) {
                const unsigned alpha =
                    static_cast<unsigned>(((str >> a) & 1) | (((str >> b) & 1) << 1));
                counts[alpha] += hist[str];
            }
            for (auto c : counts) CHECK(c == 4);  // exactly uniform
        }
    }
}

TEST_CASE("measured construction bias is at or under the budget") {
    for (std::uint64_t m : {4, 8, 12}) {
        for (std::uint64_t t : {2, 3, 4}) {
            FamilyParams p;
            p.lambda = m;
            p.sigma_size = 1;
            p.independence = t;
            p.epsilon = 0.25;
            const auto rep = measure_bias(p);
            CHECK(rep.max_l1 <= p.epsilon);
        }
    }
}

TEST_CASE("bias measurement guards its instance size") {
    FamilyParams p;
    p.lambda = 64;
    p.sigma_size = 1;
    p.independence = 2;
    p.epsilon = 0.25;
    CHECK_THROWS_AS(measure_bias(p), Error);
}

TEST_CASE("key cost report carries both reference formulas") {
    FamilyParams p;
    p.lambda = 1024;
    p.sigma_size = 256;
    p.independence = 2048;
    p.epsilon = std::exp2(-40.0);
    const auto rep = key_cost(p);
    CHECK(rep.kappa == p.seed_bits());
    CHECK(rep.prf_baseline_bits ==
          doctest::Approx(1024.0 * 40.0 * (8.0 + std::log2(1024.0))));
    CHECK(rep.family_formula_bits == doctest::Approx(2.0 * (1024.0 + 40.0 + std::log2(3.0))));
}

TEST_CASE("invalid parameter shapes are rejected") {
    FamilyParams p;
    p.lambda = 4;
    p.sigma_size = 2;
    p.independence = 9;  // > m
    p.epsilon = 0.25;
    CHECK_THROWS_AS(p.validate(), Error);
    p.independence = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p.independence = 2;
    p.epsilon = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
}
