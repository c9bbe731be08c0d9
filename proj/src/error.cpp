// error.cpp

#include "qpurify/error.hpp"

namespace qpurify {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidParameter: return "invalid_parameter";
    case ErrorCode::UnphysicalState: return "unphysical_state";
    case ErrorCode::PoleProximity: return "pole_proximity";
    case ErrorCode::StepSizeUnderflow: return "step_size_underflow";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::Verification: return "verification";
    }
    return "unknown";
}

} // namespace qpurify
