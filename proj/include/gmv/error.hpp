#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gmv {

enum class ErrorCode {
    invalid_argument,
    unit_mismatch,
    no_overlap,
    not_aligned,
    zero_energy,
    zero_reference,
    io,
    parse,
    partial_sweep,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::unit_mismatch: return "unit_mismatch";
    case ErrorCode::no_overlap: return "no_overlap";
    case ErrorCode::not_aligned: return "not_aligned";
    case ErrorCode::zero_energy: return "zero_energy";
    case ErrorCode::zero_reference: return "zero_reference";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::partial_sweep: return "partial_sweep";
    }
    return "unknown";
}

// Every failure raised by the library carries a stable, machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

inline void require(bool cond, ErrorCode code, const std::string& msg)
{
    if (!cond) throw Error(code, msg);
}

} // namespace detail
} // namespace gmv
