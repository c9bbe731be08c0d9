// error.hpp: Error type shared by the library, CLI and Python bindings

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpurify {

enum class ErrorCode {
    InvalidParameter,
    UnphysicalState,
    PoleProximity,
    StepSizeUnderflow,
    Config,
    Io,
    Verification,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string parameter = {})
        : std::runtime_error(message), code_(code), parameter_(std::move(parameter)) {}

    ErrorCode code() const noexcept { return code_; }
    // Name of the offending parameter, empty when not attributable to one.
    const std::string& parameter() const noexcept { return parameter_; }

private:
    ErrorCode code_;
    std::string parameter_;
};

} // namespace qpurify
