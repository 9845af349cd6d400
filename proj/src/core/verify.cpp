#include "verify.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace stego::verify {

namespace {

void run_parallel(std::uint64_t trials, unsigned threads,
                  const std::function<void(std::uint64_t)>& per_trial) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || trials < 2 * threads) {
        for (std::uint64_t t = 0; t < trials; ++t) per_trial(t);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::uint64_t t = next.fetch_add(1);
                if (t >= trials) return;
                per_trial(t);
            }
        });
    }
    for (auto& th : pool) th.join();
}

std::vector<std::vector<bool>> all_tables(std::size_t s) {
    std::vector<std::vector<bool>> tables;
    tables.reserve(std::size_t{1} << s);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
        std::vector<bool> f(s);
        for (std::size_t c = 0; c < s; ++c) f[c] = (mask >> c) & 1;
        tables.push_back(std::move(f));
    }
    return tables;
}

double chi2_sf(double dof, double x) {
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, x));
}

constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

AdvantageReport make_report(const std::string& name, std::uint64_t trials,
                            std::uint64_t successes) {
    AdvantageReport rep;
    rep.warden = name;
    rep.trials = trials;
    rep.success_rate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
    rep.advantage = std::abs(rep.success_rate - 0.5);
    rep.ci_method = "normal-approx";
    rep.ci99_half_width =
        trials ? kZ99 * std::sqrt(std::max(rep.success_rate * (1.0 - rep.success_rate), 0.0) /
                                  static_cast<double>(trials))
               : 0.0;
    rep.ci_contains_zero = rep.advantage <= rep.ci99_half_width;
    return rep;
}

}  // namespace

// --------------------------------------------------------------- exact

RatVec enumerate_two_draw(const std::vector<bool>& f_table, const RatVec& channel, bool m_bit) {
    if (f_table.size() != channel.size()) fail(Errc::invalid_argument, "table size mismatch");
    if (!is_distribution(channel)) fail(Errc::invalid_argument, "channel vector is not a distribution");
    RatVec out(channel.size(), Rat(0));
    // Sum over ordered draw pairs: c1 accepted when f(c1) = m, otherwise c2
    // is emitted whatever it is.
    for (std::size_t c1 = 0; c1 < channel.size(); ++c1) {
        if (f_table[c1] == m_bit) {
            out[c1] += channel[c1];
        } else {
            for (std::size_t c2 = 0; c2 < channel.size(); ++c2)
                out[c2] += channel[c1] * channel[c2];
        }
    }
    return out;
}

ExactCheckResult check_two_draw_formula(const RatVec& channel) {
    if (channel.size() > 8) fail(Errc::size_guard, "exact check limited to 8 symbols");
    ExactCheckResult res;
    res.pass = true;
    for (const auto& f : all_tables(channel.size())) {
        for (int m = 0; m <= 1; ++m) {
            const RatVec formula = two_draw_distribution<Rat>(f, channel, m == 1);
            const RatVec oracle = enumerate_two_draw(f, channel, m == 1);
            Rat sum(0);
            for (std::size_t c = 0; c < channel.size(); ++c) {
                const Rat dev = abs(formula[c] - oracle[c]);
                if (dev > res.max_deviation) res.max_deviation = dev;
                sum += formula[c];
            }
            if (sum != 1) res.pass = false;
        }
    }
    if (res.max_deviation != 0) res.pass = false;
    return res;
}

ExactCheckResult check_uniform_average(const RatVec& channel) {
    if (channel.size() > 8) fail(Errc::size_guard, "exact check limited to 8 symbols");
    ExactCheckResult res;
    res.pass = true;
    const auto tables = all_tables(channel.size());
    for (int m = 0; m <= 1; ++m) {
        RatVec avg(channel.size(), Rat(0));
        for (const auto& f : tables) {
            const RatVec d = enumerate_two_draw(f, channel, m == 1);
            for (std::size_t c = 0; c < channel.size(); ++c) avg[c] += d[c];
        }
        const Rat count(static_cast<std::int64_t>(tables.size()));
        for (std::size_t c = 0; c < channel.size(); ++c) {
            const Rat dev = abs(avg[c] / count - channel[c]);
            if (dev > res.max_deviation) res.max_deviation = dev;
        }
    }
    if (res.max_deviation != 0) res.pass = false;
    return res;
}

SuccessRateResult check_success_rate(const RatVec& channel) {
    if (channel.size() > 8) fail(Errc::size_guard, "exact check limited to 8 symbols");
    SuccessRateResult res;
    const auto tables = all_tables(channel.size());
    // For both message bits (they average identically, but enumerate both).
    Rat total(0);
    for (int m = 0; m <= 1; ++m) {
        for (const auto& f : tables) {
            const RatVec d = enumerate_two_draw(f, channel, m == 1);
            for (std::size_t c = 0; c < channel.size(); ++c)
                if (f[c] == (m == 1)) total += d[c];
        }
    }
    res.exact = total / Rat(static_cast<std::int64_t>(2 * tables.size()));

    Rat sum_sq(0), maxp(0);
    for (const auto& p : channel) {
        sum_sq += p * p;
        if (p > maxp) maxp = p;
    }
    res.identity_rhs = Rat(1, 2) + (Rat(1) - sum_sq) / 4;
    res.floor_rhs = Rat(1, 2) + (Rat(1) - maxp) / 4;
    res.pass = res.exact == res.identity_rhs && res.exact >= res.floor_rhs;
    return res;
}

const std::vector<RatVec>& rational_grid() {
    static const std::vector<RatVec> grid = [] {
        std::vector<RatVec> g;
        // |Sigma| = 2
        g.push_back({rat(1, 2), rat(1, 2)});
        g.push_back({rat(3, 4), rat(1, 4)});
        g.push_back({rat(9, 10), rat(1, 10)});
        g.push_back({rat(2, 3), rat(1, 3)});
        g.push_back({rat(1), rat(0)});
        g.push_back({rat(5, 8), rat(3, 8)});
        g.push_back({rat(7, 8), rat(1, 8)});
        // |Sigma| = 3
        g.push_back({rat(1, 3), rat(1, 3), rat(1, 3)});
        g.push_back({rat(1, 2), rat(1, 4), rat(1, 4)});
        g.push_back({rat(3, 5), rat(3, 10), rat(1, 10)});
        g.push_back({rat(9, 10), rat(1, 20), rat(1, 20)});
        g.push_back({rat(1, 2), rat(1, 3), rat(1, 6)});
        g.push_back({rat(2, 5), rat(2, 5), rat(1, 5)});
        // |Sigma| = 4
        g.push_back({rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)});
        g.push_back({rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 8)});
        g.push_back({rat(2, 5), rat(3, 10), rat(1, 5), rat(1, 10)});
        g.push_back({rat(7, 10), rat(1, 10), rat(1, 10), rat(1, 10)});
        g.push_back({rat(5, 8), rat(1, 8), rat(1, 8), rat(1, 8)});
        g.push_back({rat(9, 16), rat(3, 16), rat(3, 16), rat(1, 16)});
        g.push_back({rat(1, 3), rat(1, 3), rat(1, 6), rat(1, 6)});
        return g;
    }();
    return grid;
}

// ----------------------------------------------- adaptive query advantage

namespace {

struct ConstraintKey {
    std::vector<std::pair<std::uint64_t, bool>> entries;  // sorted by position
    bool operator<(const ConstraintKey& o) const { return entries < o.entries; }
};

}  // namespace

Rat point_mass_family_l1(unsigned t) {
    // All mass on the all-zero pattern: (1 - 2^-t) + (2^t - 1) * 2^-t.
    const Rat p = Rat(1, std::int64_t{1} << t);
    return (Rat(1) - p) + Rat((std::int64_t{1} << t) - 1) * p;
}

AdaptiveAdvantageResult check_adaptive_query_advantage(const FamilyParams& params) {
    const std::uint64_t m = params.domain_size();
    const std::uint64_t t = params.independence;
    if (m > 12 || t > 4 || params.seed_bits() > 20)
        fail(Errc::size_guard, "adaptive advantage limited to m <= 12, t <= 4, seed_bits <= 20");

    const auto hist = seed_string_histogram(params);
    const Rat total(std::int64_t{1} << params.seed_bits());

    // Count seeds whose materialized string satisfies every (pos, bit).
    auto family_prob = [&](const ConstraintKey& key) {
        std::uint64_t mask = 0, want = 0;
        for (const auto& [pos, bit] : key.entries) {
            mask |= std::uint64_t{1} << pos;
            if (bit) want |= std::uint64_t{1} << pos;
        }
        std::uint64_t count = 0;
        for (std::uint64_t str = 0; str < hist.size(); ++str)
            if ((str & mask) == want) count += hist[str];
        return Rat(static_cast<std::int64_t>(count)) / total;
    };

    std::map<ConstraintKey, Rat> memo;
    // Game-tree value: sum over answer bits of the subtree values, maximized
    // over the next query; at depth t the leaf value is |P_family - P_all|.
    std::function<Rat(const ConstraintKey&)> value = [&](const ConstraintKey& key) -> Rat {
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Rat v;
        if (key.entries.size() == t) {
            const Rat p_all = Rat(1, std::int64_t{1} << t);
            v = abs(family_prob(key) - p_all);
        } else {
            for (std::uint64_t pos = 0; pos < m; ++pos) {
                bool used = false;
                for (const auto& [qpos, qbit] : key.entries) used = used || qpos == pos;
                if (used) continue;
                for (int variant = 0; variant < 1; ++variant) {
                    ConstraintKey k0 = key, k1 = key;
                    k0.entries.emplace_back(pos, false);
                    k1.entries.emplace_back(pos, true);
                    std::sort(k0.entries.begin(), k0.entries.end());
                    std::sort(k1.entries.begin(), k1.entries.end());
                    const Rat cand = value(k0) + value(k1);
                    if (cand > v) v = cand;
                }
            }
        }
        memo.emplace(key, v);
        return v;
    };

    AdaptiveAdvantageResult res;
    res.advantage = value(ConstraintKey{}) / 2;

    // Exact restriction L1, max over t-subsets (integer counts throughout).
    Rat best(0);
    std::vector<std::uint64_t> subset(t);
    for (std::uint64_t v = 0; v < t; ++v) subset[v] = v;
    for (;;) {
        std::vector<std::uint64_t> counts(std::size_t{1} << t, 0);
        for (std::uint64_t str = 0; str < hist.size(); ++str) {
            if (hist[str] == 0) continue;
            std::uint64_t alpha = 0;
            for (std::uint64_t v = 0; v < t; ++v)
                if ((str >> subset[v]) & 1) alpha |= std::uint64_t{1} << v;
            counts[alpha] += hist[str];
        }
        Rat l1(0);
        for (std::uint64_t alpha = 0; alpha < counts.size(); ++alpha)
            l1 += abs(Rat(static_cast<std::int64_t>(counts[alpha])) / total -
                      Rat(1, std::int64_t{1} << t));
        if (l1 > best) best = l1;
        std::size_t k = t;
        while (k > 0 && subset[k - 1] == m - t + (k - 1)) --k;
        if (k == 0) break;
        subset[k - 1] += 1;
        for (std::size_t v = k; v < t; ++v) subset[v] = subset[v - 1] + 1;
    }
    res.max_subset_l1 = best;
    res.pass = res.advantage <= res.max_subset_l1;
    return res;
}

// --------------------------------------------------------------- the game

AdvantageReport run_warden_game(const GameConfig& config, const ChannelModel& channel,
                                const EmbedFn& embed_fn, const WardenFn& warden) {
    if (config.trials == 0) fail(Errc::invalid_argument, "at least one trial required");
    std::atomic<std::uint64_t> successes{0};
    run_parallel(config.trials, config.threads, [&](std::uint64_t t) {
        Rng rng = make_stream(config.master_seed, t);
        const int b = static_cast<int>(rng() & 1);
        GameTranscript tr;
        tr.message = BitVec::random(config.message_bits, rng);
        tr.initial_history = config.initial_history;
        tr.channel = &channel;
        if (b == 0) {
            tr.stego = embed_fn(tr.message, tr.initial_history, rng);
        } else {
            History h = tr.initial_history;
            tr.stego.reserve(config.lambda);
            for (std::uint64_t i = 0; i < config.lambda; ++i) {
                const std::uint32_t c = channel.draw(h, rng);
                tr.stego.push_back(c);
                h.push_back(c);
            }
        }
        if (tr.stego.size() != config.lambda)
            fail(Errc::invalid_argument, "system produced a transcript of unexpected length");
        const int guess = warden(tr, rng);
        if (guess == b) successes.fetch_add(1);
    });
    return make_report(config.warden_name, config.trials, successes.load());
}

// --------------------------------------------------------------- systems

EmbedFn full_system_embed(const ChannelModel& channel, const EpsilonTargets& eps,
                          std::uint64_t message_bits) {
    auto code = std::make_shared<const CodeSpec>(
        code_for(message_bits, channel.declared_min_entropy(), eps.decode_failure));
    auto params = std::make_shared<const FamilyParams>(
        family_params_for(code->lambda, channel.alphabet().size(), eps.family_bias));
    // Touch the field once so worker threads find the modulus cached.
    (void)KeyedFunction::from_seed(*params, BitVec(params->seed_bits()));
    const ChannelModel* ch = &channel;
    return [code, params, ch](const BitVec& msg, const History& h, Rng& rng) {
        StegoKey key{KeyedFunction::keygen(*params, rng), *code, ch->declared_min_entropy(),
                     ch->alphabet().hash(), ch->alphabet().size()};
        return stego::embed(key, msg, h, *ch, rng);
    };
}

EmbedFn ideal_family_embed(const ChannelModel& channel) {
    const ChannelModel* ch = &channel;
    return [ch](const BitVec& msg, const History& h0, Rng& rng) {
        const std::size_t s = ch->alphabet().size();
        History h = h0;
        std::vector<std::uint32_t> out;
        out.reserve(msg.size());
        for (std::size_t i = 0; i < msg.size(); ++i) {
            // Fresh uniformly random single-position table: the member of
            // the all-functions family restricted to block i.
            std::vector<bool> row(s);
            for (std::size_t c = 0; c < s; ++c) row[c] = rng() & 1;
            const std::uint32_t emitted = rejection_sample(
                [&](std::uint32_t c) { return static_cast<bool>(row[c]); }, *ch, h, msg.get(i),
                rng);
            out.push_back(emitted);
            h.push_back(emitted);
        }
        return out;
    };
}

EmbedFn known_function_embed(const ChannelModel& channel, std::vector<bool> f_table) {
    if (f_table.size() != channel.alphabet().size())
        fail(Errc::invalid_argument, "table size mismatch");
    const ChannelModel* ch = &channel;
    return [ch, f_table = std::move(f_table)](const BitVec& msg, const History& h0, Rng& rng) {
        History h = h0;
        std::vector<std::uint32_t> out;
        out.reserve(msg.size());
        for (std::size_t i = 0; i < msg.size(); ++i) {
            const std::uint32_t emitted = rejection_sample(
                [&](std::uint32_t c) { return static_cast<bool>(f_table[c]); }, *ch, h, msg.get(i),
                rng);
            out.push_back(emitted);
            h.push_back(emitted);
        }
        return out;
    };
}

EmbedFn resample_until_match_embed(const ChannelModel& channel, unsigned max_draws) {
    const ChannelModel* ch = &channel;
    return [ch, max_draws](const BitVec& msg, const History& h0, Rng& rng) {
        const std::size_t s = ch->alphabet().size();
        History h = h0;
        std::vector<std::uint32_t> out;
        out.reserve(msg.size());
        for (std::size_t i = 0; i < msg.size(); ++i) {
            std::vector<bool> row(s);
            for (std::size_t c = 0; c < s; ++c) row[c] = rng() & 1;
            std::uint32_t c = 0;
            for (unsigned d = 0; d < max_draws; ++d) {
                c = ch->draw(h, rng);
                if (row[c] == msg.get(i)) break;
            }
            out.push_back(c);
            h.push_back(c);
        }
        return out;
    };
}

// --------------------------------------------------------------- wardens

WardenFn coin_flip_warden() {
    return [](const GameTranscript&, Rng& rng) { return static_cast<int>(rng() & 1); };
}

namespace {

// Stego-side per-position likelihood table: avg[m][c] over the table set.
std::vector<std::array<Rat, 2>> transpose_likelihood(const std::vector<RatVec>& per_m) {
    std::vector<std::array<Rat, 2>> out(per_m[0].size());
    for (std::size_t c = 0; c < per_m[0].size(); ++c) {
        out[c][0] = per_m[0][c];
        out[c][1] = per_m[1][c];
    }
    return out;
}

WardenFn likelihood_warden_from(std::vector<std::array<Rat, 2>> stego_like, RatVec channel,
                                std::string /*name*/) {
    return [stego_like = std::move(stego_like), channel = std::move(channel)](
               const GameTranscript& tr, Rng& rng) -> int {
        if (tr.channel->kind() == ChannelKind::markov)
            fail(Errc::unsupported_model, "exact likelihood warden needs a memoryless channel");
        Rat l_stego(1), l_channel(1);
        for (std::size_t i = 0; i < tr.stego.size(); ++i) {
            const std::uint32_t c = tr.stego[i];
            l_stego *= stego_like[c][tr.message.get(i) ? 1 : 0];
            l_channel *= channel[c];
        }
        if (l_stego == l_channel) return static_cast<int>(rng() & 1);
        return l_stego > l_channel ? 0 : 1;
    };
}

}  // namespace

WardenFn ideal_likelihood_warden(const RatVec& channel) {
    if (!is_distribution(channel)) fail(Errc::invalid_argument, "channel vector is not a distribution");
    if (channel.size() > 8) fail(Errc::size_guard, "exact warden limited to 8 symbols");
    const auto tables = all_tables(channel.size());
    std::vector<RatVec> avg(2, RatVec(channel.size(), Rat(0)));
    for (int m = 0; m <= 1; ++m) {
        for (const auto& f : tables) {
            const RatVec d = enumerate_two_draw(f, channel, m == 1);
            for (std::size_t c = 0; c < channel.size(); ++c) avg[m][c] += d[c];
        }
        for (auto& v : avg[m]) v /= Rat(static_cast<std::int64_t>(tables.size()));
    }
    return likelihood_warden_from(transpose_likelihood(avg), channel, "ideal-likelihood");
}

WardenFn known_function_likelihood_warden(const RatVec& channel, std::vector<bool> f_table) {
    if (!is_distribution(channel)) fail(Errc::invalid_argument, "channel vector is not a distribution");
    std::vector<RatVec> like(2);
    for (int m = 0; m <= 1; ++m) like[m] = two_draw_distribution<Rat>(f_table, channel, m == 1);
    return likelihood_warden_from(transpose_likelihood(like), channel, "known-function-likelihood");
}

ChiSquareOutcome chi_square_test(const GameTranscript& tr, double alpha, double min_expected) {
    const ChannelModel& ch = *tr.channel;
    const std::size_t s = ch.alphabet().size();

    // Observed counts conditioned on the channel state at each position.
    std::map<std::uint64_t, std::vector<std::uint64_t>> counts;
    History h = tr.initial_history;
    for (const std::uint32_t c : tr.stego) {
        auto& row = counts.try_emplace(ch.state_index(h), std::vector<std::uint64_t>(s, 0))
                        .first->second;
        row[c] += 1;
        h.push_back(c);
    }

    double fisher_stat = 0.0;
    unsigned used_states = 0;
    for (const auto& [state, row] : counts) {
        const auto dist = ch.distribution_for_state(state);
        const double n_s = static_cast<double>(
            std::accumulate(row.begin(), row.end(), std::uint64_t{0}));
        // Pool cells with small expectation into one bucket.
        struct Cell {
            double expected;
            double observed;
        };
        std::vector<Cell> cells;
        Cell pooled{0.0, 0.0};
        for (std::size_t c = 0; c < s; ++c) {
            const double e = n_s * dist[c];
            const double o = static_cast<double>(row[c]);
            if (e < min_expected)
                pooled.expected += e, pooled.observed += o;
            else
                cells.push_back({e, o});
        }
        if (pooled.expected > 0.0) {
            if (pooled.expected >= min_expected) {
                cells.push_back(pooled);
            } else if (!cells.empty()) {
                auto smallest = std::min_element(cells.begin(), cells.end(),
                                                 [](const Cell& a, const Cell& b) {
                                                     return a.expected < b.expected;
                                                 });
                smallest->expected += pooled.expected;
                smallest->observed += pooled.observed;
            } else {
                continue;  // state unusable
            }
        }
        if (cells.size() < 2) continue;
        double stat = 0.0;
        for (const auto& cell : cells) {
            const double diff = cell.observed - cell.expected;
            stat += diff * diff / cell.expected;
        }
        const double dof = static_cast<double>(cells.size() - 1);
        const double p = std::max(chi2_sf(dof, stat), 1e-300);
        fisher_stat += -2.0 * std::log(p);
        ++used_states;
    }

    ChiSquareOutcome out;
    out.states_used = used_states;
    if (used_states == 0) return out;  // inconclusive
    out.conclusive = true;
    out.p_value = chi2_sf(2.0 * used_states, fisher_stat);
    out.reject = out.p_value < alpha;
    return out;
}

WardenFn chi_square_warden(double alpha) {
    return [alpha](const GameTranscript& tr, Rng& rng) -> int {
        const auto outcome = chi_square_test(tr, alpha);
        if (!outcome.conclusive) return static_cast<int>(rng() & 1);
        return outcome.reject ? 0 : 1;  // rejecting the channel law means "stego"
    };
}

CalibrationResult chi_square_calibration(const ChannelModel& channel, std::uint64_t lambda,
                                         std::uint64_t repetitions, double alpha,
                                         std::uint64_t master_seed) {
    std::atomic<std::uint64_t> rejections{0};
    run_parallel(repetitions, 0, [&](std::uint64_t repetition) {
        Rng rng = make_stream(master_seed, repetition);
        GameTranscript tr;
        tr.channel = &channel;
        History h;
        tr.stego.reserve(lambda);
        for (std::uint64_t i = 0; i < lambda; ++i) {
            const std::uint32_t c = channel.draw(h, rng);
            tr.stego.push_back(c);
            h.push_back(c);
        }
        const auto outcome = chi_square_test(tr, alpha);
        if (outcome.conclusive && outcome.reject) rejections.fetch_add(1);
    });
    CalibrationResult res;
    res.repetitions = repetitions;
    res.rejections = rejections.load();
    res.rate = static_cast<double>(res.rejections) / static_cast<double>(repetitions);
    res.pass = res.rate <= 2.0 * alpha;
    return res;
}

PowerResult chi_square_power(const ChannelModel& channel, const EmbedFn& stub,
                             std::uint64_t lambda, std::uint64_t repetitions, double alpha,
                             double required_power, std::uint64_t master_seed) {
    std::atomic<std::uint64_t> rejections{0};
    run_parallel(repetitions, 0, [&](std::uint64_t repetition) {
        Rng rng = make_stream(master_seed ^ 0x9e3779b9ULL, repetition);
        GameTranscript tr;
        tr.channel = &channel;
        tr.message = BitVec::random(lambda, rng);
        tr.stego = stub(tr.message, History{}, rng);
        const auto outcome = chi_square_test(tr, alpha);
        if (outcome.conclusive && outcome.reject) rejections.fetch_add(1);
    });
    PowerResult res;
    res.repetitions = repetitions;
    res.rejections = rejections.load();
    res.power = static_cast<double>(res.rejections) / static_cast<double>(repetitions);
    res.pass = res.power >= required_power;
    return res;
}

// --------------------------------------------------------------- recovery

RecoveryResult recovery_monte_carlo(const ChannelModel& channel, std::uint64_t n,
                                    const EpsilonTargets& eps, std::uint64_t trials,
                                    std::uint64_t master_seed, bool use_ecc, unsigned threads) {
    const double delta = channel.declared_min_entropy();
    CodeSpec code;
    if (use_ecc) {
        code = code_for(n, delta, eps.decode_failure);
    } else {
        code.n = n;
        code.lambda = n;
        code.p = 0.5 - rejection_tau(delta);
        code.epsilon_enc = 1.0;
        code.identity = true;
    }
    const FamilyParams params =
        family_params_for(code.lambda, channel.alphabet().size(), eps.family_bias);
    (void)KeyedFunction::from_seed(params, BitVec(params.seed_bits()));  // warm the field

    std::atomic<std::uint64_t> successes{0};
    run_parallel(trials, threads, [&](std::uint64_t t) {
        Rng rng = make_stream(master_seed, t);
        StegoKey key{KeyedFunction::keygen(params, rng), code, delta, channel.alphabet().hash(),
                     channel.alphabet().size()};
        const BitVec msg = BitVec::random(static_cast<std::size_t>(n), rng);
        const auto stego = embed(key, msg, History{}, channel, rng);
        if (extract(key, stego) == msg) successes.fetch_add(1);
    });

    RecoveryResult res;
    res.trials = trials;
    res.successes = successes.load();
    res.rate = static_cast<double>(res.successes) / static_cast<double>(trials);
    if (use_ecc) {
        const double q = eps.decode_failure + eps.family_bias;
        const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
        res.required = 1.0 - q - 3.0 * sigma;
        res.pass = res.rate >= res.required;
    } else {
        res.required = 0.5;
        res.pass = res.rate < 0.5;
    }
    return res;
}

// --------------------------------------------------------------- report

namespace {

std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

ChannelModel statistical_channel() {
    // Order-1 model over 8 symbols with deterministic skewed counts,
    // floored at 2 bits of min-entropy.
    std::vector<std::string> tokens;
    for (int i = 0; i < 8; ++i) tokens.emplace_back(1, static_cast<char>('a' + i));
    std::vector<std::vector<std::uint64_t>> counts(8, std::vector<std::uint64_t>(8, 0));
    for (std::uint64_t st = 0; st < 8; ++st)
        for (std::uint64_t nx = 0; nx < 8; ++nx)
            counts[st][nx] = 1 + splitmix64(st * 8 + nx) % 37;
    return ChannelModel::markov(Alphabet(tokens), 1, std::move(counts), 0.0, 2.0);
}

ChannelModel skewed_binary_channel() {
    // (9/10, 1/10) table; the declared floor is below -log2(0.9) so the
    // stored weights pass through the floor untouched.
    return ChannelModel::table(Alphabet({"a", "b"}), {0.9, 0.1}, 0.1);
}

void add(VerifyReport& rep, std::string name, std::string params, std::string stat,
         std::string bound, bool pass) {
    rep.records.push_back(
        {std::move(name), std::move(params), std::move(stat), std::move(bound),
         pass ? "PASS" : "FAIL"});
    if (!pass) rep.all_pass = false;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
    VerifyReport rep;

    // Exact sections.
    {
        Rat worst(0);
        bool pass = true;
        for (const auto& vec : rational_grid()) {
            const auto res = check_two_draw_formula(vec);
            pass = pass && res.pass;
            if (res.max_deviation > worst) worst = res.max_deviation;
        }
        add(rep, "two-draw-distribution-formula", "grid of 20 vectors, all tables, both bits",
            "max deviation " + rat_str(worst), "exactly 0", pass && worst == 0);
    }
    {
        Rat worst(0);
        bool pass = true;
        for (const auto& vec : rational_grid()) {
            const auto res = check_uniform_average(vec);
            pass = pass && res.pass;
            if (res.max_deviation > worst) worst = res.max_deviation;
        }
        add(rep, "uniform-function-average", "grid of 20 vectors, all tables, both bits",
            "max deviation " + rat_str(worst), "exactly 0", pass && worst == 0);
    }
    {
        bool pass = true;
        std::string detail;
        for (const auto& vec : rational_grid()) {
            const auto res = check_success_rate(vec);
            if (!res.pass) {
                pass = false;
                detail = "exact " + rat_str(res.exact) + " vs " + rat_str(res.identity_rhs);
            }
        }
        add(rep, "success-rate-identity", "grid of 20 vectors",
            pass ? "exact = 1/2 + (1 - sum p^2)/4 on every vector" : detail,
            "equality and floor bound", pass);
    }
    {
        bool pass = true;
        double worst_margin = 1e9;
        for (std::uint64_t m : {4, 8, 12}) {
            for (std::uint64_t t : {2, 3, 4}) {
                FamilyParams params;
                params.lambda = m;
                params.sigma_size = 1;
                params.independence = t;
                params.epsilon = 0.25;
                const auto bias = measure_bias(params);
                pass = pass && bias.max_l1 <= params.epsilon;
                worst_margin = std::min(worst_margin, params.epsilon - bias.max_l1);
            }
        }
        std::ostringstream os;
        os << "min margin " << worst_margin;
        add(rep, "family-bias-grid", "m in {4,8,12}, t in {2,3,4}, eps 1/4", os.str(),
            "measured L1 <= eps", pass);
    }
    {
        FamilyParams params;
        params.lambda = 8;
        params.sigma_size = 1;
        params.independence = 2;
        params.epsilon = 0.25;
        const auto res = check_adaptive_query_advantage(params);
        add(rep, "adaptive-query-advantage", "m=8, t=2, eps 1/4",
            "advantage " + rat_str(res.advantage) + ", restriction L1 " +
                rat_str(res.max_subset_l1),
            "advantage <= restriction L1", res.pass);
    }

    // Statistical sections.
    if (options.statistical_trials == 0) {
        rep.records.push_back({"statistical-sections", "trials = 0", "skipped", "-",
                               "INCONCLUSIVE"});
    } else {
        const ChannelModel full_channel = statistical_channel();
        const EpsilonTargets eps{std::exp2(-20.0), 1e-2};
        const std::uint64_t n = 16;
        const CodeSpec code = code_for(n, full_channel.declared_min_entropy(), eps.decode_failure);

        GameConfig cfg;
        cfg.trials = options.statistical_trials;
        cfg.lambda = code.lambda;
        cfg.message_bits = n;
        cfg.master_seed = options.master_seed;
        cfg.warden_name = "chi-square";
        cfg.threads = options.threads;
        const auto report = run_warden_game(cfg, full_channel,
                                            full_system_embed(full_channel, eps, n),
                                            chi_square_warden(0.01));
        const double lower = std::max(0.0, report.advantage - report.ci99_half_width);
        std::ostringstream os;
        os << "advantage " << report.advantage << " (99% hw " << report.ci99_half_width << ")";
        add(rep, "warden-game-full-system", "chi-square warden, n=16, delta=2", os.str(),
            "CI lower bound <= eps_F + 0.02", lower <= eps.family_bias + 0.02);

        {
            const RatVec chan{rat(3, 4), rat(1, 4)};
            const ChannelModel tiny = ChannelModel::table(Alphabet({"a", "b"}), {0.75, 0.25}, 0.4);
            GameConfig tiny_cfg;
            tiny_cfg.trials = std::min<std::uint64_t>(options.statistical_trials, 4000);
            tiny_cfg.lambda = 8;
            tiny_cfg.message_bits = 8;
            tiny_cfg.master_seed = options.master_seed + 1;
            tiny_cfg.warden_name = "ideal-likelihood";
            tiny_cfg.threads = options.threads;
            const auto tiny_rep = run_warden_game(tiny_cfg, tiny, ideal_family_embed(tiny),
                                                  ideal_likelihood_warden(chan));
            std::ostringstream os2;
            os2 << "advantage " << tiny_rep.advantage << " (99% hw " << tiny_rep.ci99_half_width
                << ")";
            add(rep, "warden-game-ideal-family", "exact likelihood, lambda=8", os2.str(),
                "CI contains 0", tiny_rep.ci_contains_zero);
        }

        const auto calib = chi_square_calibration(full_channel, code.lambda, 200, 0.01,
                                                  options.master_seed + 2);
        std::ostringstream os3;
        os3 << "false-positive rate " << calib.rate << " (" << calib.rejections << "/200)";
        add(rep, "chi-square-calibration", "channel-only transcripts, alpha 0.01", os3.str(),
            "rate <= 2 * alpha", calib.pass);
    }

    // Negative controls: deliberately broken systems must be flagged.
    if (options.negative_controls) {
        const ChannelModel skew = skewed_binary_channel();
        const RatVec chan{rat(9, 10), rat(1, 10)};
        const std::vector<bool> f0{false, true};

        GameConfig cfg;
        cfg.trials = 10000;
        cfg.lambda = 16;
        cfg.message_bits = 16;
        cfg.master_seed = options.master_seed + 3;
        cfg.warden_name = "known-function-likelihood";
        cfg.threads = options.threads;
        const auto stub_rep = run_warden_game(cfg, skew, known_function_embed(skew, f0),
                                              known_function_likelihood_warden(chan, f0));
        std::ostringstream os;
        os << "advantage " << stub_rep.advantage;
        rep.records.push_back({"negative-control-collapsed-keyspace",
                               "fixed public table on (9/10,1/10), 10^4 trials", os.str(),
                               "advantage > 0.1 expected",
                               stub_rep.advantage > 0.1 ? "EXPECTED-FAIL" : "FAIL"});
        if (stub_rep.advantage <= 0.1) rep.all_pass = false;

        const auto power = chi_square_power(skew, resample_until_match_embed(skew), 10000, 100,
                                            0.01, 0.99, options.master_seed + 4);
        std::ostringstream os2;
        os2 << "power " << power.power;
        rep.records.push_back({"negative-control-resample-until-match",
                               "chi-square on 10^4-symbol transcripts", os2.str(),
                               "power >= 0.99 expected",
                               power.pass ? "EXPECTED-FAIL" : "FAIL"});
        if (!power.pass) rep.all_pass = false;

        FamilyParams loose;
        loose.lambda = 8;
        loose.sigma_size = 1;
        loose.independence = 2;
        loose.epsilon = 0.5;  // deliberately oversized bias budget
        const auto bias = measure_bias(loose);
        std::ostringstream os4;
        os4 << "measured L1 " << bias.max_l1;
        rep.records.push_back({"negative-control-oversized-bias",
                               "family sized for eps 1/2, held to 1/64", os4.str(),
                               "measured > 1/64 expected",
                               bias.max_l1 > 1.0 / 64.0 ? "EXPECTED-FAIL" : "FAIL"});
        if (bias.max_l1 <= 1.0 / 64.0) rep.all_pass = false;
    }

    return rep;
}

std::string render_report(const VerifyReport& report) {
    std::ostringstream os;
    for (const auto& r : report.records) {
        os << "[" << r.verdict << "] " << r.name << " | " << r.params << " | " << r.statistic
           << " | bound: " << r.bound << "\n";
    }
    os << (report.all_pass ? "RESULT: all checks passed\n" : "RESULT: FAILURES present\n");
    return os.str();
}

std::string report_json(const VerifyReport& report) {
    nlohmann::json j;
    j["all_pass"] = report.all_pass;
    j["checks"] = nlohmann::json::array();
    for (const auto& r : report.records) {
        j["checks"].push_back({{"name", r.name},
                               {"params", r.params},
                               {"statistic", r.statistic},
                               {"bound", r.bound},
                               {"verdict", r.verdict}});
    }
    return j.dump(2);
}

}  // namespace stego::verify
