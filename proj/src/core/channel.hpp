#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace stego {

// Ordered alphabet of distinct tokens. rank(symbol) is the token's index and
// is the canonical on-wire representation everywhere in the library.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> symbols);

    std::size_t size() const { return symbols_.size(); }
    const std::string& token(std::uint32_t rank) const { return symbols_.at(rank); }
    const std::vector<std::string>& tokens() const { return symbols_; }

    bool contains(const std::string& token) const { return ranks_.count(token) != 0; }
    std::uint32_t rank(const std::string& token) const;

    // Order-insensitive content hash used to bind keys/sessions/stegotexts
    // to the alphabet they were produced for.
    std::uint64_t hash() const;

    bool operator==(const Alphabet& o) const { return symbols_ == o.symbols_; }

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, std::uint32_t> ranks_;
};

// Transmitted-symbol history as ranks, oldest first.
using History = std::vector<std::uint32_t>;

enum class ChannelKind { uniform, table, markov };

// A history-dependent next-symbol distribution with an enforced min-entropy
// floor: for every history, max_sigma Pr[sigma] <= 2^-delta. The floor is
// imposed by per-history mixing with the uniform distribution, using the
// smallest mixing weight that brings the maximum probability down to the cap.
class ChannelModel {
public:
    static ChannelModel uniform(Alphabet alphabet);
    static ChannelModel table(Alphabet alphabet, std::vector<double> weights, double min_entropy);
    static ChannelModel markov(Alphabet alphabet, unsigned order,
                               std::vector<std::vector<std::uint64_t>> counts, double alpha,
                               double min_entropy);

    // Order-k counts harvested from a token stream, floored at delta.
    static ChannelModel train_markov(const std::vector<std::string>& corpus, unsigned order,
                                     double min_entropy, double alpha = 0.0);

    const Alphabet& alphabet() const { return alphabet_; }
    ChannelKind kind() const { return kind_; }
    unsigned order() const { return order_; }
    double alpha() const { return alpha_; }
    double declared_min_entropy() const { return min_entropy_; }

    // Exact conditional distribution after history h (floor already applied).
    std::vector<double> distribution(const History& h) const;

    std::uint32_t draw(const History& h, Rng& rng) const;

    // Infimum of the per-history min-entropy over the enumerable state
    // space. Errors with unsupported_model when the space is too large to
    // enumerate; callers then rely on declared_min_entropy().
    double min_entropy() const;

    // State index used by the markov kind: the last `order` ranks, with
    // short histories left-padded by rank 0. Exposed for the statistical
    // warden, which conditions counts on the same states.
    std::uint64_t state_index(const History& h) const;
    std::uint64_t state_count() const;
    std::vector<double> distribution_for_state(std::uint64_t state) const;

    void save(std::ostream& os) const;
    static ChannelModel load(std::istream& is);
    void save_file(const std::string& path) const;
    static ChannelModel load_file(const std::string& path);

    bool operator==(const ChannelModel& o) const;

private:
    ChannelModel() = default;
    void validate_history(const History& h) const;
    std::vector<double> raw_distribution(std::uint64_t state) const;
    std::vector<double> apply_floor(std::vector<double> p) const;

    Alphabet alphabet_;
    ChannelKind kind_ = ChannelKind::uniform;
    double min_entropy_ = 0.0;
    unsigned order_ = 0;                               // markov only
    double alpha_ = 0.0;                               // markov add-alpha smoothing
    std::vector<double> weights_;                      // table only
    std::vector<std::vector<std::uint64_t>> counts_;   // markov: [state][next rank]
};

// Apply the min-entropy floor to an explicit probability vector; shared by
// the model and by tests that check the mixing rule in isolation.
std::vector<double> floor_mix(std::vector<double> p, double min_entropy);

}  // namespace stego
