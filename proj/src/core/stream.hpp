#pragma once

#include <optional>
#include <string>

#include "channel.hpp"
#include "onetime.hpp"
#include "prg.hpp"

namespace stego {

// Multi-message session: a shared master seed is stretched into fresh
// one-time keys, one disjoint seed-bit region per message. Sender and
// receiver advance the same (N, resume point, history) state, so after the
// same message sequence their sessions are identical.
class StreamSession {
public:
    struct Params {
        std::uint64_t message_bits = 0;  // n per message
        double family_bias = 0.0;        // eps_F
        double decode_failure = 0.0;     // eps_enc
        CodeScheme scheme = CodeScheme::repetition_rs;
    };

    static StreamSession init(const prg::Seed& master_seed, const ChannelModel& channel,
                              const Params& params);

    // Seed bits each message consumes; fixed by public parameters only.
    std::uint64_t seed_bits_per_message() const;

    std::uint64_t bits_consumed() const { return point_.position_bits(); }
    std::uint64_t messages_processed() const { return messages_; }
    const History& history() const { return history_; }
    const Params& params() const { return params_; }
    const prg::ResumePoint& resume_point() const { return point_; }

    // Derive the next one-time key, embed, advance state.
    std::vector<std::uint32_t> embed(const BitVec& message, const ChannelModel& channel, Rng& rng);

    // Mirror of embed. Returns nullopt (the fail token) on a length
    // mismatch; the state advances either way so the two ends stay in sync.
    std::optional<BitVec> extract(const std::vector<std::uint32_t>& stego,
                                  const ChannelModel& channel);

    void save_file(const std::string& path) const;
    static StreamSession load_file(const std::string& path);

    bool state_equals(const StreamSession& o) const;

private:
    StreamSession() = default;
    void check_binding(const ChannelModel& channel) const;
    StegoKey derive_key();
    void advance_history(const std::vector<std::uint32_t>& symbols);

    prg::Seed seed_{};
    prg::ResumePoint point_{};
    std::uint64_t messages_ = 0;
    History history_;

    // Channel binding.
    std::uint64_t alphabet_hash_ = 0;
    std::uint64_t sigma_size_ = 0;
    double min_entropy_ = 0.0;
    unsigned channel_order_ = 0;

    Params params_{};
    std::optional<CodeSpec> cached_code_;
};

}  // namespace stego
