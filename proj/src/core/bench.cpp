#include "bench.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "family.hpp"
#include "onetime.hpp"

namespace stego {

namespace {

ChannelModel uniform_channel(std::uint64_t sigma) {
    std::vector<std::string> tokens;
    tokens.reserve(sigma);
    for (std::uint64_t i = 0; i < sigma; ++i) tokens.push_back("s" + std::to_string(i));
    return ChannelModel::uniform(Alphabet(std::move(tokens)));
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

BenchRow bench_row(std::uint64_t n, std::uint64_t sigma, double delta, double eps_f,
                   double eps_enc, const BenchOptions& opts) {
    BenchRow row;
    row.n = n;
    row.sigma = sigma;
    row.delta = delta;
    row.eps_f = eps_f;
    row.eps_enc = eps_enc;

    const CodeSpec code = code_for(n, delta, eps_enc);
    row.lambda = code.lambda;
    const FamilyParams params = family_params_for(code.lambda, sigma, eps_f);
    const KeyCostReport cost = key_cost(params);
    row.kappa = cost.kappa;
    row.family_formula_bits = cost.family_formula_bits;
    row.prf_baseline_bits = cost.prf_baseline_bits;
    row.improvement_factor = cost.prf_baseline_bits / static_cast<double>(cost.kappa);

    if (code.lambda <= opts.timing_lambda_cap) {
        // A channel with min-entropy delta needs at least 2^delta symbols;
        // demo rows use a uniform alphabet of the requested size with the
        // floor declared at delta.
        ChannelModel channel = uniform_channel(sigma);
        if (delta > channel.declared_min_entropy())
            fail(Errc::unachievable_floor, "bench row delta exceeds log2(sigma)");
        ChannelModel bound_channel =
            ChannelModel::table(channel.alphabet(),
                                std::vector<double>(sigma, 1.0), delta);
        Rng rng = make_rng(opts.master_seed);
        StegoKey key = make_key(n, EpsilonTargets{eps_f, eps_enc}, bound_channel, rng);
        const BitVec msg = BitVec::random(static_cast<std::size_t>(n), rng);

        auto t0 = std::chrono::steady_clock::now();
        const auto stego = embed(key, msg, History{}, bound_channel, rng);
        row.embed_ms = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        (void)extract(key, stego);
        row.extract_ms = ms_since(t0);
        row.timed = true;
    }
    return row;
}

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
    std::vector<BenchRow> rows;
    rows.push_back(bench_row(16, 4, 2.0, std::exp2(-20.0), 1e-2, opts));
    rows.push_back(bench_row(64, 4, 2.0, std::exp2(-20.0), 1e-3, opts));
    rows.push_back(bench_row(64, 8, 3.0, std::exp2(-20.0), 1e-3, opts));
    rows.push_back(bench_row(256, 16, 2.0, std::exp2(-30.0), 1e-3, opts));
    rows.push_back(bench_row(1024, 256, 2.0, std::exp2(-40.0), 1e-3, opts));
    return rows;
}

std::string render_bench(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "n sigma delta eps_F | lambda kappa(bits) family-formula prf-baseline factor | "
          "embed(ms) extract(ms)\n";
    for (const auto& r : rows) {
        os << r.n << " " << r.sigma << " " << r.delta << " " << r.eps_f << " | " << r.lambda
           << " " << r.kappa << " " << r.family_formula_bits << " " << r.prf_baseline_bits << " "
           << r.improvement_factor << " | ";
        if (r.timed)
            os << r.embed_ms << " " << r.extract_ms;
        else
            os << "- -";
        os << "\n";
    }
    return os.str();
}

}  // namespace stego
