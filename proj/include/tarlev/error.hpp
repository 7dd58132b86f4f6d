#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tarlev {

enum class ErrorCode {
    InvalidSpec,
    InvalidArgument,
    NonStationaryRegime,
    DegenerateRegime,
    DegenerateVariance,
    InsufficientHistory,
    InsufficientData,
    SingularDesign,
    NoFeasibleCandidate,
    EmptyRegime,
    ZeroNoiseWeight,
    DegenerateResiduals,
    NonPositiveVolatility,
    DegenerateRegressor,
    NonPositiveDefinite,
    NoConvergence,
    MalformedCsv,
    NonPositivePrice,
    EmptySeries,
    Configuration,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonStationaryRegime: return "NonStationaryRegime";
        case ErrorCode::DegenerateRegime: return "DegenerateRegime";
        case ErrorCode::DegenerateVariance: return "DegenerateVariance";
        case ErrorCode::InsufficientHistory: return "InsufficientHistory";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::SingularDesign: return "SingularDesign";
        case ErrorCode::NoFeasibleCandidate: return "NoFeasibleCandidate";
        case ErrorCode::EmptyRegime: return "EmptyRegime";
        case ErrorCode::ZeroNoiseWeight: return "ZeroNoiseWeight";
        case ErrorCode::DegenerateResiduals: return "DegenerateResiduals";
        case ErrorCode::NonPositiveVolatility: return "NonPositiveVolatility";
        case ErrorCode::DegenerateRegressor: return "DegenerateRegressor";
        case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::MalformedCsv: return "MalformedCsv";
        case ErrorCode::NonPositivePrice: return "NonPositivePrice";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::Configuration: return "Configuration";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Library-wide exception. `code()` lets callers branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    /// Configuration/input problems as opposed to numerical failures.
    [[nodiscard]] bool is_configuration() const noexcept {
        switch (code_) {
            case ErrorCode::InvalidSpec:
            case ErrorCode::InvalidArgument:
            case ErrorCode::MalformedCsv:
            case ErrorCode::NonPositivePrice:
            case ErrorCode::EmptySeries:
            case ErrorCode::Configuration:
            case ErrorCode::Io:
                return true;
            default:
                return false;
        }
    }

private:
    ErrorCode code_;
};

}  // namespace tarlev
