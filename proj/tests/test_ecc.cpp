#include <doctest.h>

#include <cmath>

#include "ecc.hpp"
#include "rng.hpp"

using namespace stego;

namespace {

BitVec random_bits(std::size_t n, Rng& rng) { return BitVec::random(n, rng); }

// Flip each bit independently with probability p[i].
BitVec add_noise(const BitVec& cw, const std::vector<double>& p, Rng& rng) {
    BitVec out = cw;
    for (std::size_t i = 0; i < cw.size(); ++i)
        if (canonical_unit(rng) < p[i]) out.flip(i);
    return out;
}

}  // namespace

TEST_CASE("binary symmetric channel capacity") {
    CHECK(bsc_capacity(0.5) == doctest::Approx(0.0));
    CHECK(bsc_capacity(0.0) == doctest::Approx(1.0));
    CHECK(bsc_capacity(0.375) == doctest::Approx(0.04564).epsilon(1e-3));
}

TEST_CASE("reed-solomon corrects errors and erasures within budget") {
    const unsigned n = 20, k = 8;
    Rng rng = make_rng(44);
    for (int it = 0; it < 300; ++it) {
        std::vector<std::uint8_t> data(k);
        for (auto& b : data) b = static_cast<std::uint8_t>(rng());
        auto cw = rs::encode(data, n, k);

        // random errata within 2E + Z <= n - k = 12
        const unsigned erasures = static_cast<unsigned>(uniform_below(rng, 5));
        const unsigned errors = static_cast<unsigned>(uniform_below(rng, (12 - erasures) / 2 + 1));
        std::vector<unsigned> positions;
        while (positions.size() < erasures + errors) {
            unsigned pos = static_cast<unsigned>(uniform_below(rng, n));
            bool dup = false;
            for (auto q : positions) dup = dup || q == pos;
            if (!dup) positions.push_back(pos);
        }
        auto received = cw;
        std::vector<unsigned> erasure_idx(positions.begin(), positions.begin() + erasures);
        for (unsigned i = 0; i < erasures + errors; ++i) {
            std::uint8_t delta = static_cast<std::uint8_t>(1 + uniform_below(rng, 255));
            received[positions[i]] ^= delta;
        }
        const auto decoded = rs::decode(received, n, k, erasure_idx);
        CHECK(decoded == data);
    }
}

TEST_CASE("reed-solomon exhaustive single and double errors") {
    const unsigned n = 12, k = 6;
    std::vector<std::uint8_t> data{1, 2, 3, 250, 128, 77};
    const auto cw = rs::encode(data, n, k);
    for (unsigned i = 0; i < n; ++i) {
        for (unsigned j = i; j < n; ++j) {
            auto received = cw;
            received[i] ^= 0x5a;
            received[j] ^= 0xa5;
            CHECK(rs::decode(received, n, k, {}) == data);
        }
    }
}

TEST_CASE("build at p=0 is the identity code") {
    const auto spec = build_code(40, 0.0, 1e-3);
    CHECK(spec.identity);
    CHECK(spec.lambda == 40);
    CHECK(spec.rate() == doctest::Approx(1.0));
    Rng rng = make_rng(1);
    const auto m = random_bits(40, rng);
    CHECK(encode(spec, m) == m);
    CHECK(decode(spec, m) == m);
}

TEST_CASE("build meets the analytic bound and reports sane rate") {
    const auto spec = build_code(16, 0.25, 1e-3);
    CHECK(spec.failure_bound <= 1e-3);
    CHECK(spec.lambda >= spec.n);
    CHECK(spec.rate() <= 1.0);
    CHECK(spec.capacity() == doctest::Approx(bsc_capacity(0.25)));
    CHECK(analytic_failure_bound(spec, spec.p) == doctest::Approx(spec.failure_bound));
    // bound is monotone in the crossover
    CHECK(analytic_failure_bound(spec, 0.15) <= spec.failure_bound);
}

TEST_CASE("noiseless round-trip, exhaustive for short messages") {
    for (std::uint64_t n : {1, 5, 12}) {
        const auto spec = build_code(n, 0.25, 1e-2);
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
            BitVec m(static_cast<std::size_t>(n));
            for (std::uint64_t i = 0; i < n; ++i) m.set(i, (v >> i) & 1);
            CHECK(decode(spec, encode(spec, m)) == m);
        }
    }
}

TEST_CASE("encoding is deterministic and injective for n <= 12") {
    const auto spec = build_code(12, 0.2, 1e-2);
    std::vector<BitVec> codewords;
    for (std::uint64_t v = 0; v < (1u << 12); ++v) {
        BitVec m(12);
        for (unsigned i = 0; i < 12; ++i) m.set(i, (v >> i) & 1);
        const auto c1 = encode(spec, m);
        CHECK(c1 == encode(spec, m));
        codewords.push_back(c1);
    }
    for (std::size_t i = 0; i < codewords.size(); ++i)
        for (std::size_t j = i + 1; j < codewords.size(); j += 977)  // sampled pairs
            CHECK(codewords[i] != codewords[j]);
    // direct neighbours differ too
    for (std::size_t i = 1; i < codewords.size(); ++i) CHECK(codewords[i] != codewords[i - 1]);
}

TEST_CASE("single bit flip anywhere is corrected when the inner code repeats") {
    const auto spec = build_code(12, 0.2, 1e-2);
    REQUIRE(spec.scheme == CodeScheme::repetition_rs);
    REQUIRE(spec.inner_rho >= 3);
    Rng rng = make_rng(7);
    const auto m = random_bits(12, rng);
    const auto cw = encode(spec, m);
    for (std::size_t i = 0; i < cw.size(); ++i) {
        BitVec corrupted = cw;
        corrupted.flip(i);
        CHECK(decode(spec, corrupted) == m);
    }
}

TEST_CASE("monte carlo failure rate at design p stays within target") {
    const auto spec = build_code(16, 0.25, 1e-3);
    Rng rng = make_rng(1001);
    const int trials = 10000;
    int failures = 0;
    const std::vector<double> flat(spec.lambda, spec.p);
    for (int t = 0; t < trials; ++t) {
        const auto m = random_bits(16, rng);
        if (decode(spec, add_noise(encode(spec, m), flat, rng)) != m) ++failures;
    }
    const double rate = static_cast<double>(failures) / trials;
    const double sigma = std::sqrt(1e-3 * (1 - 1e-3) / trials);
    CHECK(rate <= 1e-3 + 3 * sigma);
}

TEST_CASE("heterogeneous error probabilities at or under p do not break the contract") {
    const auto spec = build_code(16, 0.25, 1e-3);
    Rng rng = make_rng(2002);
    std::vector<double> probs(spec.lambda);
    for (auto& q : probs) q = spec.p * canonical_unit(rng);
    const int trials = 4000;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        const auto m = random_bits(16, rng);
        if (decode(spec, add_noise(encode(spec, m), probs, rng)) != m) ++failures;
    }
    const double sigma = std::sqrt(1e-3 * (1 - 1e-3) / trials);
    CHECK(static_cast<double>(failures) / trials <= 1e-3 + 3 * sigma);
}

TEST_CASE("random-linear scheme round-trips and meets its bound") {
    const auto spec = build_code(16, 0.05, 1e-3, CodeScheme::random_linear_rs);
    CHECK(spec.scheme == CodeScheme::random_linear_rs);
    CHECK(spec.failure_bound <= 1e-3);
    Rng rng = make_rng(3003);
    for (int it = 0; it < 200; ++it) {
        const auto m = random_bits(16, rng);
        CHECK(decode(spec, encode(spec, m)) == m);
    }
    const std::vector<double> flat(spec.lambda, spec.p);
    int failures = 0;
    for (int t = 0; t < 3000; ++t) {
        const auto m = random_bits(16, rng);
        if (decode(spec, add_noise(encode(spec, m), flat, rng)) != m) ++failures;
    }
    CHECK(static_cast<double>(failures) / 3000.0 <= 1e-3 + 3 * std::sqrt(1e-3 / 3000.0));
}

TEST_CASE("infeasible crossover is refused") {
    CHECK_THROWS_AS(build_code(64, 0.5, 1e-3), Error);
    BuildOptions tight;
    tight.lambda_cap = 64;
    CHECK_THROWS_AS(build_code(64, 0.45, 1e-6, CodeScheme::repetition_rs, tight), Error);
}

TEST_CASE("codespec serialization round-trips") {
    const auto spec = build_code(24, 0.3, 1e-3);
    std::vector<std::uint8_t> buf;
    spec.serialize(buf);
    std::size_t off = 0;
    const auto back = CodeSpec::deserialize(buf.data(), buf.size(), off);
    CHECK(off == buf.size());
    CHECK(back == spec);
}

TEST_CASE("decode rejects only wrong lengths") {
    const auto spec = build_code(8, 0.2, 1e-2);
    CHECK_THROWS_AS(decode(spec, BitVec(spec.lambda + 1)), Error);
    CHECK_THROWS_AS(encode(spec, BitVec(9)), Error);
    (void)decode(spec, BitVec(spec.lambda));  // all-zero input still decodes
}
