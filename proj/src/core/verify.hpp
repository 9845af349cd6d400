#pragma once

#include <functional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "family.hpp"
#include "onetime.hpp"
#include "rational.hpp"

namespace stego::verify {

// ------------------------------------------------------------ exact oracles
//
// Every check in this section runs in exact rational arithmetic and demands
// zero deviation. The enumeration side never reuses the formula under test.

// Distribution of the two-draw sampler obtained independently, by summing
// over ordered draw pairs (c1, c2).
RatVec enumerate_two_draw(const std::vector<bool>& f_table, const RatVec& channel, bool m_bit);

struct ExactCheckResult {
    bool pass = false;
    Rat max_deviation;  // stays zero on pass
};

// Formula vs enumeration over every function table and both message bits.
ExactCheckResult check_two_draw_formula(const RatVec& channel);

// Average of the sampler's distribution over all function tables equals the
// channel vector, for both message bits.
ExactCheckResult check_uniform_average(const RatVec& channel);

struct SuccessRateResult {
    Rat exact;         // Pr over uniform f that f(output) = m, by enumeration
    Rat identity_rhs;  // 1/2 + (1 - sum_i p_i^2)/4
    Rat floor_rhs;     // 1/2 + (1 - max_i p_i)/4
    bool pass = false;
};
SuccessRateResult check_success_rate(const RatVec& channel);

// The canonical 20-vector grid over alphabet sizes 2..4.
const std::vector<RatVec>& rational_grid();

// Exhaustive adaptive t-query distinguisher between the implemented family
// and the all-functions family, evaluated by game-tree recursion over
// constraint sets. Exact; guarded to tiny instances.
struct AdaptiveAdvantageResult {
    Rat advantage;
    Rat max_subset_l1;  // exhaustive restriction distance, exact
    bool pass = false;  // advantage <= max_subset_l1
};
AdaptiveAdvantageResult check_adaptive_query_advantage(const FamilyParams& params);

// Restriction L1 of the family that contains only the constant-zero
// function: 2 - 2^{1-t} for every subset.
Rat point_mass_family_l1(unsigned t);

// ------------------------------------------------------------ warden games

struct GameTranscript {
    BitVec message;  // m*, known to the warden
    std::vector<std::uint32_t> stego;
    History initial_history;
    const ChannelModel* channel = nullptr;
};

struct AdvantageReport {
    std::string warden;
    std::uint64_t trials = 0;
    double success_rate = 0.0;
    double advantage = 0.0;          // |success_rate - 1/2|
    double ci99_half_width = 0.0;    // on the success rate
    std::string ci_method;
    bool ci_contains_zero = false;   // advantage CI touches zero
};

using EmbedFn =
    std::function<std::vector<std::uint32_t>(const BitVec& message, const History&, Rng&)>;
using WardenFn = std::function<int(const GameTranscript&, Rng&)>;

struct GameConfig {
    std::uint64_t trials = 0;
    std::uint64_t lambda = 0;        // transcript symbols
    std::uint64_t message_bits = 0;  // |m*|
    History initial_history;
    std::uint64_t master_seed = 0;
    std::string warden_name;
    unsigned threads = 0;  // 0: hardware default
};

// Distinguishing game: per trial draw b, produce either an embedded
// transcript (b=0) or plain channel output with advancing history (b=1),
// and score the warden's guess.
AdvantageReport run_warden_game(const GameConfig& config, const ChannelModel& channel,
                                const EmbedFn& embed_fn, const WardenFn& warden);

// --- systems under test ---

// The real one-time system; fresh construction-family key per trial.
EmbedFn full_system_embed(const ChannelModel& channel, const EpsilonTargets& eps,
                          std::uint64_t message_bits);

// Identity-code system keyed by a fresh uniformly random function table per
// trial (the all-functions family).
EmbedFn ideal_family_embed(const ChannelModel& channel);

// Broken control: the keyspace is collapsed to one fixed, publicly known
// single-position table, reused at every block.
EmbedFn known_function_embed(const ChannelModel& channel, std::vector<bool> f_table);

// Broken control: redraw until the keyed bit matches (bounded), instead of
// the two-draw rule; keyed by fresh random tables per position.
EmbedFn resample_until_match_embed(const ChannelModel& channel, unsigned max_draws = 64);

// --- wardens ---

WardenFn coin_flip_warden();

// Exact likelihood-ratio wardens for history-independent channels; the
// stego-side likelihood is computed by enumeration over function tables.
WardenFn ideal_likelihood_warden(const RatVec& channel);
WardenFn known_function_likelihood_warden(const RatVec& channel, std::vector<bool> f_table);

// Conditional goodness-of-fit vs the channel law, pooled per markov state,
// combined across states through Fisher's method.
struct ChiSquareOutcome {
    bool conclusive = false;
    bool reject = false;
    double p_value = 1.0;
    unsigned states_used = 0;
};
ChiSquareOutcome chi_square_test(const GameTranscript& transcript, double alpha,
                                 double min_expected = 30.0);
WardenFn chi_square_warden(double alpha);

// False-positive rate of the chi-square warden on channel-only data.
struct CalibrationResult {
    std::uint64_t repetitions = 0;
    std::uint64_t rejections = 0;
    double rate = 0.0;
    bool pass = false;  // rate <= 2 * alpha
};
CalibrationResult chi_square_calibration(const ChannelModel& channel, std::uint64_t lambda,
                                         std::uint64_t repetitions, double alpha,
                                         std::uint64_t master_seed);

// Rejection power of the chi-square warden against a broken system.
struct PowerResult {
    std::uint64_t repetitions = 0;
    std::uint64_t rejections = 0;
    double power = 0.0;
    bool pass = false;
};
PowerResult chi_square_power(const ChannelModel& channel, const EmbedFn& stub,
                             std::uint64_t lambda, std::uint64_t repetitions, double alpha,
                             double required_power, std::uint64_t master_seed);

// ------------------------------------------------------------ soundness MC

struct RecoveryResult {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double rate = 0.0;
    double required = 0.0;
    bool pass = false;
};

// End-to-end recovery rate with a fresh key per trial. use_ecc=false swaps
// in the identity code (negative control).
RecoveryResult recovery_monte_carlo(const ChannelModel& channel, std::uint64_t n,
                                    const EpsilonTargets& eps, std::uint64_t trials,
                                    std::uint64_t master_seed, bool use_ecc = true,
                                    unsigned threads = 0);

// ------------------------------------------------------------ report

struct CheckRecord {
    std::string name;
    std::string params;
    std::string statistic;
    std::string bound;
    std::string verdict;  // PASS | FAIL | INCONCLUSIVE | EXPECTED-FAIL
};

struct VerifyOptions {
    std::uint64_t master_seed = 0x5747564259ULL;
    std::uint64_t statistical_trials = 2000;  // 0 disables statistical sections
    bool negative_controls = false;
    unsigned threads = 0;
};

struct VerifyReport {
    std::vector<CheckRecord> records;
    bool all_pass = true;  // FAIL records only; EXPECTED-FAIL/INCONCLUSIVE don't fail the run
};

VerifyReport run_verification(const VerifyOptions& options);
std::string render_report(const VerifyReport& report);
std::string report_json(const VerifyReport& report);

}  // namespace stego::verify
