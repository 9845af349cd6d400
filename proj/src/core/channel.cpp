#include "channel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace stego {

namespace {

constexpr std::uint64_t kMaxEnumeratedStates = std::uint64_t{1} << 24;

bool valid_token(const std::string& t) {
    if (t.empty()) return false;
    for (unsigned char c : t)
        if (c <= ' ' || c == 0x7f) return false;
    return true;
}

// Shortest round-trip representation; from_chars reads it back bit-exactly.
std::string double_to_string(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        fail(Errc::bad_format, "bad floating-point literal: " + s);
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        fail(Errc::bad_format, "bad integer literal: " + s);
    return v;
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.size() < 2) fail(Errc::invalid_argument, "alphabet needs at least 2 symbols");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (!valid_token(symbols_[i]))
            fail(Errc::invalid_argument, "alphabet token may not be empty or contain whitespace");
        auto [it, inserted] = ranks_.emplace(symbols_[i], static_cast<std::uint32_t>(i));
        (void)it;
        if (!inserted) fail(Errc::invalid_argument, "duplicate alphabet token: " + symbols_[i]);
    }
}

std::uint32_t Alphabet::rank(const std::string& token) const {
    auto it = ranks_.find(token);
    if (it == ranks_.end()) fail(Errc::malformed_history, "symbol not in alphabet: " + token);
    return it->second;
}

std::uint64_t Alphabet::hash() const {
    // FNV-1a over tokens with a separator, so ("ab","c") != ("a","bc").
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    for (const auto& t : symbols_) {
        for (unsigned char c : t) mix(c);
        mix(0);
    }
    return h;
}

std::vector<double> floor_mix(std::vector<double> p, double min_entropy) {
    const double s = static_cast<double>(p.size());
    const double cap = std::exp2(-min_entropy);
    double maxp = 0.0;
    for (double v : p) maxp = std::max(maxp, v);
    if (maxp <= cap) return p;
    // Smallest w with max over sigma of (1-w)*p + w/s <= cap. The maximum is
    // attained at the largest raw probability.
    const double w = (maxp - cap) / (maxp - 1.0 / s);
    for (double& v : p) v = (1.0 - w) * v + w / s;
    return p;
}

ChannelModel ChannelModel::uniform(Alphabet alphabet) {
    ChannelModel m;
    m.alphabet_ = std::move(alphabet);
    m.kind_ = ChannelKind::uniform;
    m.min_entropy_ = std::log2(static_cast<double>(m.alphabet_.size()));
    return m;
}

ChannelModel ChannelModel::table(Alphabet alphabet, std::vector<double> weights,
                                 double min_entropy) {
    ChannelModel m;
    m.alphabet_ = std::move(alphabet);
    m.kind_ = ChannelKind::table;
    m.weights_ = std::move(weights);
    m.min_entropy_ = min_entropy;
    if (m.weights_.size() != m.alphabet_.size())
        fail(Errc::invalid_argument, "weight count does not match alphabet size");
    double total = 0.0;
    for (double w : m.weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) fail(Errc::invalid_argument, "weights must be finite and non-negative");
        total += w;
    }
    if (total <= 0.0) fail(Errc::invalid_argument, "weights must not all be zero");
    if (min_entropy < 0.0 || min_entropy > std::log2(static_cast<double>(m.alphabet_.size())) + 1e-12)
        fail(Errc::unachievable_floor, "min-entropy floor exceeds log2(alphabet size)");
    return m;
}

ChannelModel ChannelModel::markov(Alphabet alphabet, unsigned order,
                                  std::vector<std::vector<std::uint64_t>> counts, double alpha,
                                  double min_entropy) {
    ChannelModel m;
    m.alphabet_ = std::move(alphabet);
    m.kind_ = ChannelKind::markov;
    m.order_ = order;
    m.alpha_ = alpha;
    m.min_entropy_ = min_entropy;
    const std::size_t s = m.alphabet_.size();
    if (alpha < 0.0 || !std::isfinite(alpha)) fail(Errc::invalid_argument, "alpha must be non-negative");
    if (min_entropy < 0.0 || min_entropy > std::log2(static_cast<double>(s)) + 1e-12)
        fail(Errc::unachievable_floor, "min-entropy floor exceeds log2(alphabet size)");
    double states = std::pow(static_cast<double>(s), static_cast<double>(order));
    if (states > static_cast<double>(kMaxEnumeratedStates))
        fail(Errc::unsupported_model, "markov state space too large to enumerate");
    m.counts_ = std::move(counts);
    m.counts_.resize(static_cast<std::size_t>(states));
    for (auto& row : m.counts_) row.resize(s, 0);
    return m;
}

ChannelModel ChannelModel::train_markov(const std::vector<std::string>& corpus, unsigned order,
                                        double min_entropy, double alpha) {
    if (corpus.empty()) fail(Errc::invalid_argument, "corpus is empty");
    std::set<std::string> uniq(corpus.begin(), corpus.end());
    std::vector<std::string> symbols(uniq.begin(), uniq.end());
    if (symbols.size() < 2)
        fail(Errc::invalid_argument, "corpus must contain at least 2 distinct tokens");
    Alphabet alphabet(std::move(symbols));
    const std::size_t s = alphabet.size();
    if (min_entropy > std::log2(static_cast<double>(s)) + 1e-12)
        fail(Errc::unachievable_floor, "min-entropy floor exceeds log2(alphabet size)");

    double states_d = std::pow(static_cast<double>(s), static_cast<double>(order));
    if (states_d > static_cast<double>(kMaxEnumeratedStates))
        fail(Errc::unsupported_model, "markov state space too large to enumerate");
    std::vector<std::vector<std::uint64_t>> counts(static_cast<std::size_t>(states_d),
                                                   std::vector<std::uint64_t>(s, 0));
    std::vector<std::uint32_t> ranks;
    ranks.reserve(corpus.size());
    for (const auto& t : corpus) ranks.push_back(alphabet.rank(t));
    for (std::size_t i = order; i < ranks.size(); ++i) {
        std::uint64_t state = 0;
        for (std::size_t j = i - order; j < i; ++j) state = state * s + ranks[j];
        counts[state][ranks[i]] += 1;
    }
    return markov(std::move(alphabet), order, std::move(counts), alpha, min_entropy);
}

void ChannelModel::validate_history(const History& h) const {
    for (auto r : h)
        if (r >= alphabet_.size())
            fail(Errc::malformed_history, "history contains rank outside alphabet");
}

std::uint64_t ChannelModel::state_count() const {
    if (kind_ != ChannelKind::markov) return 1;
    std::uint64_t n = 1;
    for (unsigned i = 0; i < order_; ++i) n *= alphabet_.size();
    return n;
}

std::uint64_t ChannelModel::state_index(const History& h) const {
    if (kind_ != ChannelKind::markov || order_ == 0) return 0;
    const std::size_t s = alphabet_.size();
    std::uint64_t state = 0;
    // Last `order` ranks; shorter histories are left-padded with rank 0.
    for (unsigned i = 0; i < order_; ++i) {
        std::uint32_t r = 0;
        if (h.size() + i >= order_) r = h[h.size() + i - order_];
        state = state * s + r;
    }
    return state;
}

std::vector<double> ChannelModel::raw_distribution(std::uint64_t state) const {
    const std::size_t s = alphabet_.size();
    switch (kind_) {
        case ChannelKind::uniform:
            return std::vector<double>(s, 1.0 / static_cast<double>(s));
        case ChannelKind::table: {
            double total = 0.0;
            for (double w : weights_) total += w;
            std::vector<double> p(s);
            for (std::size_t i = 0; i < s; ++i) p[i] = weights_[i] / total;
            return p;
        }
        case ChannelKind::markov: {
            const auto& row = counts_[state];
            double total = 0.0;
            for (auto c : row) total += static_cast<double>(c);
            total += alpha_ * static_cast<double>(s);
            if (total <= 0.0) return std::vector<double>(s, 1.0 / static_cast<double>(s));
            std::vector<double> p(s);
            for (std::size_t i = 0; i < s; ++i)
                p[i] = (static_cast<double>(row[i]) + alpha_) / total;
            return p;
        }
    }
    fail(Errc::invalid_argument, "unreachable channel kind");
}

std::vector<double> ChannelModel::apply_floor(std::vector<double> p) const {
    return floor_mix(std::move(p), min_entropy_);
}

std::vector<double> ChannelModel::distribution_for_state(std::uint64_t state) const {
    return apply_floor(raw_distribution(state));
}

std::vector<double> ChannelModel::distribution(const History& h) const {
    validate_history(h);
    return distribution_for_state(state_index(h));
}

std::uint32_t ChannelModel::draw(const History& h, Rng& rng) const {
    const auto p = distribution(h);
    const double u = canonical_unit(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return static_cast<std::uint32_t>(i);
    }
    return static_cast<std::uint32_t>(p.size() - 1);
}

double ChannelModel::min_entropy() const {
    const std::uint64_t n = state_count();
    double worst = std::numeric_limits<double>::infinity();
    for (std::uint64_t st = 0; st < n; ++st) {
        const auto p = distribution_for_state(st);
        double maxp = 0.0;
        for (double v : p) maxp = std::max(maxp, v);
        worst = std::min(worst, -std::log2(maxp));
    }
    return worst;
}

bool ChannelModel::operator==(const ChannelModel& o) const {
    return alphabet_ == o.alphabet_ && kind_ == o.kind_ && min_entropy_ == o.min_entropy_ &&
           order_ == o.order_ && alpha_ == o.alpha_ && weights_ == o.weights_ &&
           counts_ == o.counts_;
}

void ChannelModel::save(std::ostream& os) const {
    os << "stego-channel-v1\n";
    os << "kind ";
    switch (kind_) {
        case ChannelKind::uniform: os << "uniform"; break;
        case ChannelKind::table: os << "table"; break;
        case ChannelKind::markov: os << "markov"; break;
    }
    os << "\n";
    os << "min_entropy " << double_to_string(min_entropy_) << "\n";
    os << "alphabet " << alphabet_.size() << "\n";
    for (const auto& t : alphabet_.tokens()) os << t << "\n";
    if (kind_ == ChannelKind::table) {
        os << "weights";
        for (double w : weights_) os << " " << double_to_string(w);
        os << "\n";
    } else if (kind_ == ChannelKind::markov) {
        os << "order " << order_ << "\n";
        os << "alpha " << double_to_string(alpha_) << "\n";
        std::size_t nonzero = 0;
        for (const auto& row : counts_)
            if (std::any_of(row.begin(), row.end(), [](std::uint64_t c) { return c != 0; })) ++nonzero;
        os << "states " << nonzero << "\n";
        for (std::size_t st = 0; st < counts_.size(); ++st) {
            const auto& row = counts_[st];
            if (!std::any_of(row.begin(), row.end(), [](std::uint64_t c) { return c != 0; })) continue;
            os << st;
            for (auto c : row) os << " " << c;
            os << "\n";
        }
    }
    os << "end\n";
}

ChannelModel ChannelModel::load(std::istream& is) {
    std::string line;
    auto next_line = [&]() -> std::string {
        if (!std::getline(is, line)) fail(Errc::bad_format, "truncated channel file");
        return line;
    };
    if (next_line() != "stego-channel-v1") fail(Errc::bad_format, "not a channel model file");

    auto expect_field = [&](const std::string& key) -> std::string {
        std::string l = next_line();
        if (l.rfind(key + " ", 0) != 0) fail(Errc::bad_format, "expected field: " + key);
        return l.substr(key.size() + 1);
    };

    const std::string kind_str = expect_field("kind");
    const double min_entropy = parse_double(expect_field("min_entropy"));
    const std::uint64_t s = parse_u64(expect_field("alphabet"));
    std::vector<std::string> tokens;
    tokens.reserve(s);
    for (std::uint64_t i = 0; i < s; ++i) tokens.push_back(next_line());
    Alphabet alphabet(std::move(tokens));

    if (kind_str == "uniform") {
        if (next_line() != "end") fail(Errc::bad_format, "expected end marker");
        ChannelModel m = uniform(std::move(alphabet));
        m.min_entropy_ = min_entropy;
        return m;
    }
    if (kind_str == "table") {
        std::istringstream ws(expect_field("weights"));
        std::vector<double> weights;
        std::string tok;
        while (ws >> tok) weights.push_back(parse_double(tok));
        if (next_line() != "end") fail(Errc::bad_format, "expected end marker");
        return table(std::move(alphabet), std::move(weights), min_entropy);
    }
    if (kind_str == "markov") {
        const unsigned order = static_cast<unsigned>(parse_u64(expect_field("order")));
        const double alpha = parse_double(expect_field("alpha"));
        const std::uint64_t nstates = parse_u64(expect_field("states"));
        std::uint64_t total_states = 1;
        for (unsigned i = 0; i < order; ++i) total_states *= alphabet.size();
        std::vector<std::vector<std::uint64_t>> counts(total_states,
                                                       std::vector<std::uint64_t>(alphabet.size(), 0));
        for (std::uint64_t i = 0; i < nstates; ++i) {
            std::istringstream row(next_line());
            std::string tok;
            if (!(row >> tok)) fail(Errc::bad_format, "bad state row");
            const std::uint64_t st = parse_u64(tok);
            if (st >= total_states) fail(Errc::bad_format, "state index out of range");
            for (std::size_t j = 0; j < alphabet.size(); ++j) {
                if (!(row >> tok)) fail(Errc::bad_format, "bad state row");
                counts[st][j] = parse_u64(tok);
            }
        }
        if (next_line() != "end") fail(Errc::bad_format, "expected end marker");
        return markov(std::move(alphabet), order, std::move(counts), alpha, min_entropy);
    }
    fail(Errc::bad_format, "unknown channel kind: " + kind_str);
}

void ChannelModel::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(Errc::io_failure, "cannot open for writing: " + path);
    save(os);
    if (!os.good()) fail(Errc::io_failure, "write failed: " + path);
}

ChannelModel ChannelModel::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(Errc::io_failure, "cannot open: " + path);
    return load(is);
}

}  // namespace stego
