#include "stream.hpp"

#include <algorithm>

#include "keyfile.hpp"
#include "serialize.hpp"

namespace stego {

namespace {
constexpr char kMagic[8] = {'S', 'T', 'G', 'S', 'E', 'S', '0', '1'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

StreamSession StreamSession::init(const prg::Seed& master_seed, const ChannelModel& channel,
                                  const Params& params) {
    if (params.message_bits == 0) fail(Errc::invalid_argument, "message length must be positive");
    if (!(params.family_bias > 0.0) || !(params.family_bias < 1.0) ||
        !(params.decode_failure > 0.0) || !(params.decode_failure < 1.0))
        fail(Errc::invalid_argument, "bias and failure targets must lie in (0,1)");
    StreamSession s;
    s.seed_ = master_seed;
    s.point_ = prg::start(master_seed);
    s.alphabet_hash_ = channel.alphabet().hash();
    s.sigma_size_ = channel.alphabet().size();
    s.min_entropy_ = channel.declared_min_entropy();
    s.channel_order_ = channel.order();
    s.params_ = params;
    // Fails fast when the channel floor cannot support the requested code.
    s.cached_code_ = code_for(params.message_bits, s.min_entropy_, params.decode_failure,
                              params.scheme);
    return s;
}

void StreamSession::check_binding(const ChannelModel& channel) const {
    if (channel.alphabet().hash() != alphabet_hash_ ||
        channel.declared_min_entropy() != min_entropy_ || channel.order() != channel_order_)
        fail(Errc::state_mismatch, "session is bound to a different channel model");
}

std::uint64_t StreamSession::seed_bits_per_message() const {
    return family_params_for(cached_code_->lambda, sigma_size_, params_.family_bias).seed_bits();
}

StegoKey StreamSession::derive_key() {
    // Key seed bits come from the next PRG region; the code instance is a
    // function of public parameters only.
    const FamilyParams fp =
        family_params_for(cached_code_->lambda, sigma_size_, params_.family_bias);
    BitVec seed_bits = prg::resume(seed_, point_, fp.seed_bits());
    return StegoKey{KeyedFunction::from_seed(fp, std::move(seed_bits)), *cached_code_,
                    min_entropy_, alphabet_hash_, sigma_size_};
}

void StreamSession::advance_history(const std::vector<std::uint32_t>& symbols) {
    for (auto c : symbols) history_.push_back(c);
    // Only the last `order` symbols influence the channel; older entries
    // are dead state and would grow the session file per message.
    if (history_.size() > channel_order_)
        history_.erase(history_.begin(),
                       history_.end() - static_cast<std::ptrdiff_t>(channel_order_));
}

std::vector<std::uint32_t> StreamSession::embed(const BitVec& message, const ChannelModel& channel,
                                                Rng& rng) {
    check_binding(channel);
    if (message.size() != params_.message_bits)
        fail(Errc::length_mismatch, "message length mismatch");
    StegoKey key = derive_key();
    auto stego = stego::embed(key, message, history_, channel, rng);
    advance_history(stego);
    ++messages_;
    return stego;
}

std::optional<BitVec> StreamSession::extract(const std::vector<std::uint32_t>& stego,
                                             const ChannelModel& channel) {
    check_binding(channel);
    // State advances even on malformed input, keeping both ends in sync
    // under the passive-adversary model.
    StegoKey key = derive_key();
    ++messages_;
    if (stego.size() != key.code.lambda ||
        std::any_of(stego.begin(), stego.end(),
                    [&](std::uint32_t c) { return c >= sigma_size_; })) {
        return std::nullopt;
    }
    BitVec out = stego::extract(key, stego);
    advance_history(stego);
    return out;
}

bool StreamSession::state_equals(const StreamSession& o) const {
    return point_.block == o.point_.block && point_.offset == o.point_.offset &&
           point_.fingerprint == o.point_.fingerprint && history_ == o.history_ &&
           messages_ == o.messages_;
}

void StreamSession::save_file(const std::string& path) const {
    std::vector<std::uint8_t> out;
    wire::put_bytes(out, reinterpret_cast<const std::uint8_t*>(kMagic), 8);
    wire::put_u32(out, kVersion);
    wire::put_bytes(out, seed_.data(), seed_.size());
    wire::put_u64(out, point_.fingerprint);
    wire::put_u64(out, point_.block);
    wire::put_u32(out, point_.offset);
    wire::put_u64(out, messages_);
    wire::put_u64(out, alphabet_hash_);
    wire::put_u64(out, sigma_size_);
    wire::put_f64(out, min_entropy_);
    wire::put_u32(out, channel_order_);
    wire::put_u64(out, params_.message_bits);
    wire::put_f64(out, params_.family_bias);
    wire::put_f64(out, params_.decode_failure);
    wire::put_u32(out, static_cast<std::uint32_t>(params_.scheme));
    wire::put_u32(out, static_cast<std::uint32_t>(history_.size()));
    for (auto c : history_) wire::put_u32(out, c);
    atomic_write_file(path, out);
}

StreamSession StreamSession::load_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    const std::uint8_t* d = bytes.data();
    const std::size_t len = bytes.size();
    std::size_t off = 0;
    wire::need(len, off, 8);
    if (!std::equal(kMagic, kMagic + 8, d)) fail(Errc::bad_format, "not a session file");
    off += 8;
    if (wire::get_u32(d, len, off) != kVersion)
        fail(Errc::bad_format, "unsupported session version");

    StreamSession s;
    wire::need(len, off, s.seed_.size());
    std::copy(d + off, d + off + s.seed_.size(), s.seed_.begin());
    off += s.seed_.size();
    s.point_.fingerprint = wire::get_u64(d, len, off);
    s.point_.block = wire::get_u64(d, len, off);
    s.point_.offset = wire::get_u32(d, len, off);
    s.messages_ = wire::get_u64(d, len, off);
    s.alphabet_hash_ = wire::get_u64(d, len, off);
    s.sigma_size_ = wire::get_u64(d, len, off);
    s.min_entropy_ = wire::get_f64(d, len, off);
    s.channel_order_ = wire::get_u32(d, len, off);
    s.params_.message_bits = wire::get_u64(d, len, off);
    s.params_.family_bias = wire::get_f64(d, len, off);
    s.params_.decode_failure = wire::get_f64(d, len, off);
    const std::uint32_t scheme_raw = wire::get_u32(d, len, off);
    if (scheme_raw > 1) fail(Errc::bad_format, "unknown code scheme");
    s.params_.scheme = static_cast<CodeScheme>(scheme_raw);
    const std::uint32_t hist_len = wire::get_u32(d, len, off);
    for (std::uint32_t i = 0; i < hist_len; ++i) s.history_.push_back(wire::get_u32(d, len, off));
    if (off != len) fail(Errc::bad_format, "trailing bytes in session file");
    if (s.point_.fingerprint != prg::seed_fingerprint(s.seed_))
        fail(Errc::state_mismatch, "session fingerprint does not match its seed");

    s.cached_code_ = code_for(s.params_.message_bits, s.min_entropy_, s.params_.decode_failure,
                              s.params_.scheme);
    return s;
}

}  // namespace stego
