#pragma once

#include <stdexcept>
#include <string>

namespace stego {

// Error categories shared between the C++ core and the C API, which maps
// them 1:1 onto its status codes.
enum class Errc {
    invalid_argument = 1,
    malformed_history,
    unachievable_floor,
    unsupported_model,
    infeasible_parameters,
    size_guard,
    length_mismatch,
    io_failure,
    bad_format,
    state_mismatch,
    key_consumed,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace stego
