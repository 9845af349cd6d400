#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "channel.hpp"
#include "ecc.hpp"

namespace stego {

// Seed-cost comparison: the implemented family's seed bits per message next
// to the per-bit pseudorandom-function baseline lambda * k * (log2 sigma +
// log2 lambda) at k = log2(1/eps_F), plus embed/extract wall-clock where
// the row is small enough to run.
struct BenchRow {
    std::uint64_t n = 0;
    std::uint64_t sigma = 0;
    double delta = 0.0;
    double eps_f = 0.0;
    double eps_enc = 0.0;

    std::uint64_t lambda = 0;
    std::uint64_t kappa = 0;             // measured seed bits
    double family_formula_bits = 0.0;    // 2*(lambda + log2(1/eps_F) + lll sigma)
    double prf_baseline_bits = 0.0;
    double improvement_factor = 0.0;     // baseline / kappa

    bool timed = false;
    double embed_ms = 0.0;
    double extract_ms = 0.0;
};

struct BenchOptions {
    std::uint64_t master_seed = 1;
    std::uint64_t timing_lambda_cap = 8192;  // rows above this report cost only
};

BenchRow bench_row(std::uint64_t n, std::uint64_t sigma, double delta, double eps_f,
                   double eps_enc, const BenchOptions& opts);

std::vector<BenchRow> run_bench(const BenchOptions& opts);

std::string render_bench(const std::vector<BenchRow>& rows);

}  // namespace stego
