// error.hpp: Error type shared by every module; carries the originating module and operation

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leakage {

enum class ErrorCode {
    InvalidArgument,
    NonHermitianInput,
    NotPositiveDefinite,
    SingularMatrix,
    NoGapFound,
    UncoveredEigenvalue,
    OverlappingIntervals,
    IndexOutOfRange,
    AnchorOutsideWindow,
    EmptyWindow,
    ZeroGap,
    GammaBelowThreshold,
    NotConverged,
    GammaBelowSWThreshold,
    SingularBlockGram,
    OutOfDomain,
    NonpositiveBandgap,
    DegenerateSweep,
    GroupNotPreserved,
    ConfigInvalid,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonHermitianInput: return "NonHermitianInput";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NoGapFound: return "NoGapFound";
        case ErrorCode::UncoveredEigenvalue: return "UncoveredEigenvalue";
        case ErrorCode::OverlappingIntervals: return "OverlappingIntervals";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::AnchorOutsideWindow: return "AnchorOutsideWindow";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::ZeroGap: return "ZeroGap";
        case ErrorCode::GammaBelowThreshold: return "GammaBelowThreshold";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::GammaBelowSWThreshold: return "GammaBelowSWThreshold";
        case ErrorCode::SingularBlockGram: return "SingularBlockGram";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NonpositiveBandgap: return "NonpositiveBandgap";
        case ErrorCode::DegenerateSweep: return "DegenerateSweep";
        case ErrorCode::GroupNotPreserved: return "GroupNotPreserved";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

// what() reads "<module>.<operation>: <Code>: <message>"
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string module, std::string operation, const std::string& message)
        : std::runtime_error(module + "." + operation + ": " + std::string(to_string(code)) + ": " + message),
          code_(code), module_(std::move(module)), operation_(std::move(operation)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }

private:
    ErrorCode code_;
    std::string module_;
    std::string operation_;
};

} // namespace leakage
