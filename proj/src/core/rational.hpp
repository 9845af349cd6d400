#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

namespace stego {

// Exact rational arithmetic for the enumeration oracles. The equality
// checks in the verification harness are zero-tolerance, so they must not
// go through floating point at any step.
using Rat = boost::multiprecision::cpp_rational;
using RatVec = std::vector<Rat>;

inline Rat rat(std::int64_t num, std::int64_t den = 1) { return Rat(num, den); }

inline double rat_to_double(const Rat& r) { return static_cast<double>(r); }

inline bool is_distribution(const RatVec& v) {
    Rat sum = 0;
    for (const auto& p : v) {
        if (p < 0) return false;
        sum += p;
    }
    return sum == 1;
}

}  // namespace stego
