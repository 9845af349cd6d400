#include "onetime.hpp"

#include <cmath>

namespace stego {

double rejection_tau(double min_entropy) {
    if (min_entropy < 0.0) fail(Errc::invalid_argument, "min-entropy must be non-negative");
    return 0.25 * (1.0 - std::exp2(-min_entropy));
}

SuccessBound success_probability_bound(double min_entropy) {
    const double tau = rejection_tau(min_entropy);
    return SuccessBound{tau, 0.5 + tau};
}

FamilyParams family_params_for(std::uint64_t lambda, std::uint64_t sigma_size, double eps_f) {
    FamilyParams params;
    params.lambda = lambda;
    params.sigma_size = sigma_size;
    params.independence = 2 * lambda;
    params.epsilon = eps_f;
    params.validate();
    return params;
}

CodeSpec code_for(std::uint64_t n, double min_entropy, double eps_enc, CodeScheme scheme) {
    const double tau = rejection_tau(min_entropy);
    if (tau <= 0.0)
        fail(Errc::infeasible_parameters,
             "channel min-entropy floor is zero; the induced bit channel has no capacity");
    return build_code(n, 0.5 - tau, eps_enc, scheme);
}

std::uint64_t key_seed_bits(std::uint64_t n, std::uint64_t sigma_size, double min_entropy,
                            const EpsilonTargets& eps, CodeScheme scheme) {
    const CodeSpec code = code_for(n, min_entropy, eps.decode_failure, scheme);
    return family_params_for(code.lambda, sigma_size, eps.family_bias).seed_bits();
}

namespace {

StegoKey assemble_key(std::uint64_t n, const EpsilonTargets& eps, const ChannelModel& channel,
                      CodeScheme scheme, std::optional<BitVec> seed, Rng* rng) {
    if (!(eps.family_bias > 0.0) || !(eps.family_bias < 1.0) || !(eps.decode_failure > 0.0) ||
        !(eps.decode_failure < 1.0))
        fail(Errc::invalid_argument, "bias and failure targets must lie in (0,1)");
    const double delta = channel.declared_min_entropy();
    CodeSpec code = code_for(n, delta, eps.decode_failure, scheme);
    FamilyParams params = family_params_for(code.lambda, channel.alphabet().size(),
                                            eps.family_bias);
    KeyedFunction f = seed ? KeyedFunction::from_seed(params, std::move(*seed))
                           : KeyedFunction::keygen(params, *rng);
    return StegoKey{std::move(f), std::move(code), delta, channel.alphabet().hash(),
                    channel.alphabet().size()};
}

}  // namespace

StegoKey make_key(std::uint64_t n, const EpsilonTargets& eps, const ChannelModel& channel,
                  Rng& rng, CodeScheme scheme) {
    return assemble_key(n, eps, channel, scheme, std::nullopt, &rng);
}

StegoKey key_from_seed(std::uint64_t n, const EpsilonTargets& eps, const ChannelModel& channel,
                       BitVec seed, CodeScheme scheme) {
    return assemble_key(n, eps, channel, scheme, std::move(seed), nullptr);
}

std::uint32_t rejection_sample_fn(const std::function<bool(std::uint32_t)>& f_bit,
                                  const ChannelModel& channel, const History& h, bool message_bit,
                                  Rng& rng, std::uint64_t* draw_count) {
    return rejection_sample(f_bit, channel, h, message_bit, rng, draw_count);
}

std::vector<std::uint32_t> embed(const StegoKey& key, const BitVec& message, History h,
                                 const ChannelModel& channel, Rng& rng, EmbedTrace* trace) {
    if (message.size() != key.code.n) fail(Errc::length_mismatch, "message length mismatch");
    if (channel.alphabet().hash() != key.alphabet_hash)
        fail(Errc::state_mismatch, "key was built for a different alphabet");

    const BitVec coded = encode(key.code, message);
    const std::uint64_t lambda = key.code.lambda;
    std::vector<std::uint32_t> stego;
    stego.reserve(static_cast<std::size_t>(lambda));

    FamilyCursor cursor(key.f);
    std::uint64_t draws = 0;
    for (std::uint64_t i = 1; i <= lambda; ++i) {
        cursor.seek_block(i);
        const bool m_bit = coded.get(static_cast<std::size_t>(i - 1));
        // Both draws of one block see the same history; the history advances
        // only by the symbol actually emitted.
        const std::uint32_t c1 = channel.draw(h, rng);
        ++draws;
        if (trace) trace->draws.push_back({i, h.size(), c1});
        std::uint32_t emitted = c1;
        if (cursor.eval(c1) != m_bit) {
            const std::uint32_t c2 = channel.draw(h, rng);
            ++draws;
            if (trace) trace->draws.push_back({i, h.size(), c2});
            emitted = c2;
        }
        stego.push_back(emitted);
        h.push_back(emitted);
    }
    if (trace) trace->total_draws = draws;
    return stego;
}

BitVec extract(const StegoKey& key, const std::vector<std::uint32_t>& stego) {
    if (stego.size() != key.code.lambda) fail(Errc::length_mismatch, "stegotext length mismatch");
    for (std::uint32_t c : stego)
        if (c >= key.sigma_size) fail(Errc::malformed_history, "stegotext symbol outside alphabet");
    BitVec coded(static_cast<std::size_t>(key.code.lambda));
    FamilyCursor cursor(key.f);
    for (std::uint64_t i = 1; i <= key.code.lambda; ++i) {
        cursor.seek_block(i);
        coded.set(static_cast<std::size_t>(i - 1), cursor.eval(stego[i - 1]));
    }
    return decode(key.code, coded);
}

}  // namespace stego
