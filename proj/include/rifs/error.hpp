#pragma once

#include <stdexcept>
#include <string>

namespace rifs {

enum class ErrorCode {
    invalid_point,
    invalid_parameter,
    indeterminate_evaluation,
    chart,
    not_expandable,
    not_in_koenigs_regime,
    order_mismatch,
    scale_too_large,
    undefined_tail,
    degenerate_orbit,
    undefined_value,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace rifs
