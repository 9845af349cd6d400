#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bits.hpp"
#include "channel.hpp"
#include "ecc.hpp"
#include "error.hpp"
#include "family.hpp"
#include "rng.hpp"

namespace stego {

// Per-bit advantage of two-draw rejection sampling over a coin flip on a
// channel with min-entropy floor delta: tau = (1 - 2^-delta) / 4. The
// induced bit channel has crossover at most 1/2 - tau.
double rejection_tau(double min_entropy);

struct SuccessBound {
    double tau;
    double per_bit_success;  // 1/2 + tau
};
SuccessBound success_probability_bound(double min_entropy);

struct EpsilonTargets {
    double family_bias;    // eps_F
    double decode_failure; // eps_enc
};

// One-time key: keyed function sized for 2*lambda-wise independence over
// the (block, symbol) domain, the code instance, and the channel binding.
struct StegoKey {
    KeyedFunction f;
    CodeSpec code;
    double min_entropy = 0.0;       // delta the key was built for
    std::uint64_t alphabet_hash = 0;
    std::uint64_t sigma_size = 0;

    std::uint64_t message_bits() const { return code.n; }
    std::uint64_t stego_symbols() const { return code.lambda; }
    double tau() const { return rejection_tau(min_entropy); }
};

// Family sizing from public parameters only; both ends of a stream session
// must agree on the seed length without communicating.
FamilyParams family_params_for(std::uint64_t lambda, std::uint64_t sigma_size, double eps_f);
CodeSpec code_for(std::uint64_t n, double min_entropy, double eps_enc,
                  CodeScheme scheme = CodeScheme::repetition_rs);
std::uint64_t key_seed_bits(std::uint64_t n, std::uint64_t sigma_size, double min_entropy,
                            const EpsilonTargets& eps,
                            CodeScheme scheme = CodeScheme::repetition_rs);

StegoKey make_key(std::uint64_t n, const EpsilonTargets& eps, const ChannelModel& channel,
                  Rng& rng, CodeScheme scheme = CodeScheme::repetition_rs);
StegoKey key_from_seed(std::uint64_t n, const EpsilonTargets& eps, const ChannelModel& channel,
                       BitVec seed, CodeScheme scheme = CodeScheme::repetition_rs);

// Two-draw rejection sampling: draw c1 from the channel at history h; emit
// it when f(c1) matches the message bit, otherwise emit a second
// independent draw unconditionally. Never more than two draws.
template <typename FBit>
std::uint32_t rejection_sample(FBit&& f_bit, const ChannelModel& channel, const History& h,
                               bool message_bit, Rng& rng, std::uint64_t* draw_count = nullptr) {
    const std::uint32_t c1 = channel.draw(h, rng);
    if (draw_count) ++*draw_count;
    if (static_cast<bool>(f_bit(c1)) == message_bit) return c1;
    const std::uint32_t c2 = channel.draw(h, rng);
    if (draw_count) ++*draw_count;
    return c2;
}

std::uint32_t rejection_sample_fn(const std::function<bool(std::uint32_t)>& f_bit,
                                  const ChannelModel& channel, const History& h, bool message_bit,
                                  Rng& rng, std::uint64_t* draw_count = nullptr);

// Exact output distribution of the two-draw sampler for an explicit
// single-position function table and channel vector:
//   p_c * (1 + miss)  where f(c) == m
//   p_c * miss        where f(c) != m,   miss = Pr[f(C) != m].
// Works over double or exact rationals.
template <typename Scalar>
std::vector<Scalar> two_draw_distribution(const std::vector<bool>& f_table,
                                          const std::vector<Scalar>& channel_dist,
                                          bool message_bit) {
    if (f_table.size() != channel_dist.size())
        fail(Errc::invalid_argument, "function table size mismatch");
    Scalar sum{0}, miss{0};
    for (std::size_t c = 0; c < channel_dist.size(); ++c) {
        sum += channel_dist[c];
        if (f_table[c] != message_bit) miss += channel_dist[c];
    }
    if (!(sum == Scalar{1})) {
        // Doubles get a tolerance; exact types must match exactly.
        double s = static_cast<double>(sum);
        if (s < 1.0 - 1e-12 || s > 1.0 + 1e-12)
            fail(Errc::invalid_argument, "channel vector is not normalized");
    }
    std::vector<Scalar> out(channel_dist.size());
    for (std::size_t c = 0; c < channel_dist.size(); ++c) {
        out[c] = f_table[c] == message_bit ? channel_dist[c] * (Scalar{1} + miss)
                                           : channel_dist[c] * miss;
    }
    return out;
}

// Trace of one embedding run, for draw-count and history-advance checks.
struct EmbedTrace {
    struct Draw {
        std::uint64_t block;        // 1-based
        std::size_t history_size;   // |h| at the moment of the draw
        std::uint32_t drawn;
    };
    std::vector<Draw> draws;
    std::uint64_t total_draws = 0;
};

// Figure-style embed: encode, then one rejection-sampled symbol per code
// bit, appending each emitted symbol to the history.
std::vector<std::uint32_t> embed(const StegoKey& key, const BitVec& message, History h,
                                 const ChannelModel& channel, Rng& rng,
                                 EmbedTrace* trace = nullptr);

// Extract: evaluate the keyed bit at each received symbol, then decode.
// Always returns a message for well-formed input; wrong length errors.
BitVec extract(const StegoKey& key, const std::vector<std::uint32_t>& stego);

}  // namespace stego
