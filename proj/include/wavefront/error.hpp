#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavefront {

enum class ErrorCode {
    invalid_geometry,
    negative_input,
    not_invariant,
    out_of_range,
    no_convergence,
    no_tangency,
    not_in_domain,
    boundary_zero,
    tail_divergence,
    loss_of_positivity,
    regime_mismatch,
    inconclusive,
    stability_violation,
    front_not_formed,
    invalid_config,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_geometry: return "InvalidGeometry";
        case ErrorCode::negative_input: return "NegativeInput";
        case ErrorCode::not_invariant: return "NotInvariant";
        case ErrorCode::out_of_range: return "OutOfRange";
        case ErrorCode::no_convergence: return "NoConvergence";
        case ErrorCode::no_tangency: return "NoTangency";
        case ErrorCode::not_in_domain: return "NotInDomain";
        case ErrorCode::boundary_zero: return "BoundaryZero";
        case ErrorCode::tail_divergence: return "TailDivergence";
        case ErrorCode::loss_of_positivity: return "LossOfPositivity";
        case ErrorCode::regime_mismatch: return "RegimeMismatch";
        case ErrorCode::inconclusive: return "Inconclusive";
        case ErrorCode::stability_violation: return "StabilityViolation";
        case ErrorCode::front_not_formed: return "FrontNotFormed";
        case ErrorCode::invalid_config: return "InvalidConfig";
    }
    return "Unknown";
}

/// Exception type for every failure reported by the library. The code is
/// machine-readable; the message carries the witness or diagnostic.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace wavefront
