#include "family.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace stego {

namespace {

// Fields are shared by all keys with the same degree; the modulus scan for
// large degrees is the expensive part and runs once per degree.
std::shared_ptr<const gf2::Field> shared_field(unsigned r) {
    static std::mutex mu;
    static std::map<unsigned, std::shared_ptr<const gf2::Field>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(r);
    if (it != cache.end()) return it->second;
    auto f = std::make_shared<const gf2::Field>(r, gf2::min_irreducible_tail(r));
    cache.emplace(r, f);
    return f;
}

gf2::Field::Elem elem_from_bits(const gf2::Field& field, const BitVec& seed, std::size_t start) {
    gf2::Field::Elem e(field.word_count(), 0);
    for (unsigned j = 0; j < field.degree(); ++j) {
        if (seed.get(start + j)) e[j >> 6] |= std::uint64_t{1} << (j & 63);
    }
    return e;
}

}  // namespace

double FamilyParams::domain_bits() const {
    return std::log2(static_cast<double>(domain_size()));
}

void FamilyParams::validate() const {
    if (lambda == 0 || sigma_size == 0) fail(Errc::invalid_argument, "empty family domain");
    if (independence < 1 || independence > domain_size())
        fail(Errc::invalid_argument, "independence order t must satisfy 1 <= t <= m");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        fail(Errc::invalid_argument, "bias budget must lie in (0,1)");
}

unsigned FamilyParams::field_degree() const {
    validate();
    // Smallest r with m / 2^r <= epsilon * 2^{-t/2}.
    const long double lg_m = std::log2(static_cast<long double>(domain_size()));
    const long double target = lg_m + static_cast<long double>(independence) / 2.0L +
                               std::log2(1.0L / static_cast<long double>(epsilon));
    long double r = std::ceil(target - 1e-9L);
    if (r < 1.0L) r = 1.0L;
    while (lg_m > r - static_cast<long double>(independence) / 2.0L +
                      std::log2(static_cast<long double>(epsilon)))
        r += 1.0L;
    return static_cast<unsigned>(r);
}

KeyedFunction::KeyedFunction(FamilyParams params, BitVec seed)
    : params_(params), seed_(std::move(seed)) {
    params_.validate();
    const unsigned r = params_.field_degree();
    if (seed_.size() != 2ull * r) fail(Errc::invalid_argument, "seed length does not match 2r");
    field_ = shared_field(r);
    a_ = elem_from_bits(*field_, seed_, 0);
    b_ = elem_from_bits(*field_, seed_, r);
}

KeyedFunction KeyedFunction::keygen(const FamilyParams& params, Rng& rng) {
    params.validate();
    return KeyedFunction(params, BitVec::random(params.seed_bits(), rng));
}

KeyedFunction KeyedFunction::from_seed(const FamilyParams& params, BitVec seed) {
    return KeyedFunction(params, std::move(seed));
}

bool KeyedFunction::eval_position(std::uint64_t j) const {
    if (j >= params_.domain_size()) fail(Errc::invalid_argument, "position outside family domain");
    return gf2::Field::dot(field_->pow(a_, j), b_);
}

bool KeyedFunction::eval(std::uint64_t i, std::uint64_t rank) const {
    if (i < 1 || i > params_.lambda) fail(Errc::invalid_argument, "block index out of range");
    if (rank >= params_.sigma_size) fail(Errc::invalid_argument, "symbol rank out of range");
    return eval_position((i - 1) * params_.sigma_size + rank);
}

BitVec KeyedFunction::materialize() const {
    const std::uint64_t m = params_.domain_size();
    if (m > (std::uint64_t{1} << 26))
        fail(Errc::size_guard, "refusing to materialize more than 2^26 positions");
    BitVec bits(static_cast<std::size_t>(m));
    gf2::Field::Elem v = field_->one();
    for (std::uint64_t j = 0; j < m; ++j) {
        bits.set(static_cast<std::size_t>(j), gf2::Field::dot(v, b_));
        if (j + 1 < m) v = field_->mul(v, a_);
    }
    return bits;
}

FamilyCursor::FamilyCursor(const KeyedFunction& f) : f_(&f) {
    const auto& field = f.field();
    const std::uint64_t s = f.params().sigma_size;
    pow_rank_.reserve(s + 1);
    pow_rank_.push_back(field.one());
    for (std::uint64_t k = 1; k <= s; ++k) pow_rank_.push_back(field.mul(pow_rank_.back(), f.elem_a()));
    block_base_ = field.one();
    scratch_ = field.zero();
}

void FamilyCursor::seek_block(std::uint64_t i) {
    if (i < block_) fail(Errc::invalid_argument, "family cursor cannot move backwards");
    if (i > f_->params().lambda) fail(Errc::invalid_argument, "block index out of range");
    const auto& field = f_->field();
    while (block_ < i) {
        block_base_ = field.mul(block_base_, pow_rank_[f_->params().sigma_size]);
        ++block_;
    }
}

bool FamilyCursor::eval(std::uint64_t rank) {
    if (rank >= f_->params().sigma_size) fail(Errc::invalid_argument, "symbol rank out of range");
    scratch_ = f_->field().mul(block_base_, pow_rank_[rank]);
    return gf2::Field::dot(scratch_, f_->elem_b());
}

std::vector<std::uint64_t> seed_string_histogram(const FamilyParams& params) {
    params.validate();
    const std::uint64_t m = params.domain_size();
    const std::uint64_t kappa = params.seed_bits();
    if (m > 16) fail(Errc::size_guard, "histogram enumeration limited to m <= 16");
    if (kappa > 24) fail(Errc::size_guard, "histogram enumeration limited to seed_bits <= 24");

    const unsigned r = params.field_degree();
    const gf2::Field field(r, gf2::min_irreducible_tail(r));
    std::vector<std::uint64_t> hist(std::size_t{1} << m, 0);
    const std::uint64_t seeds = std::uint64_t{1} << kappa;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        const std::uint64_t a_bits = seed & ((std::uint64_t{1} << r) - 1);
        const std::uint64_t b_bits = seed >> r;
        gf2::Field::Elem a{a_bits}, b{b_bits}, v{1};
        std::uint64_t str = 0;
        for (std::uint64_t j = 0; j < m; ++j) {
            if (gf2::Field::dot(v, b)) str |= std::uint64_t{1} << j;
            if (j + 1 < m) v = field.mul(v, a);
        }
        hist[str] += 1;
    }
    return hist;
}

BiasReport measure_bias(const FamilyParams& params) {
    params.validate();
    const std::uint64_t m = params.domain_size();
    const std::uint64_t t = params.independence;
    if (m > 16) fail(Errc::size_guard, "bias measurement limited to m <= 16");
    if (t > 4) fail(Errc::size_guard, "bias measurement limited to t <= 4");
    if (params.seed_bits() > 24) fail(Errc::size_guard, "bias measurement limited to seed_bits <= 24");

    const auto hist = seed_string_histogram(params);
    const std::uint64_t seeds = std::uint64_t{1} << params.seed_bits();

    BiasReport report;
    std::vector<std::uint64_t> subset(t);
    // Iterate t-subsets of the m positions in lexicographic order.
    for (std::uint64_t v = 0; v < t; ++v) subset[v] = v;
    for (;;) {
        std::vector<std::uint64_t> pattern_count(std::size_t{1} << t, 0);
        for (std::uint64_t str = 0; str < hist.size(); ++str) {
            if (hist[str] == 0) continue;
            std::uint64_t alpha = 0;
            for (std::uint64_t v = 0; v < t; ++v)
                if ((str >> subset[v]) & 1) alpha |= std::uint64_t{1} << v;
            pattern_count[alpha] += hist[str];
        }
        // L1 numerator in units of 1 / (seeds * 2^t), kept integral.
        std::uint64_t num = 0;
        for (std::uint64_t alpha = 0; alpha < pattern_count.size(); ++alpha) {
            const std::uint64_t scaled = pattern_count[alpha] << t;
            num += scaled > seeds ? scaled - seeds : seeds - scaled;
        }
        const double l1 = static_cast<double>(num) /
                          (static_cast<double>(seeds) * static_cast<double>(std::uint64_t{1} << t));
        if (l1 > report.max_l1) {
            report.max_l1 = l1;
            report.worst_subset = subset;
        }
        // next subset
        std::size_t k = t;
        while (k > 0 && subset[k - 1] == m - t + (k - 1)) --k;
        if (k == 0) break;
        subset[k - 1] += 1;
        for (std::size_t v = k; v < t; ++v) subset[v] = subset[v - 1] + 1;
    }
    return report;
}

KeyCostReport key_cost(const FamilyParams& params) {
    params.validate();
    KeyCostReport rep;
    rep.field_degree = params.field_degree();
    rep.kappa = params.seed_bits();
    const double k_bits = std::log2(1.0 / params.epsilon);
    const double lambda = static_cast<double>(params.lambda);
    const double sigma = static_cast<double>(params.sigma_size);
    double lll = 0.0;
    if (sigma > 2.0) {
        const double ll = std::log2(std::log2(sigma));
        lll = ll > 1.0 ? std::log2(ll) : 0.0;
    }
    rep.family_formula_bits = 2.0 * (lambda + k_bits + std::max(0.0, lll));
    rep.prf_baseline_bits = lambda * k_bits * (std::log2(std::max(2.0, sigma)) + std::log2(lambda));
    return rep;
}

}  // namespace stego
