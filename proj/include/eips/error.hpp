#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eips {

enum class ErrorCode {
    kInvalidInput,
    kTrivialPqi,
    kSingularTransform,
    kDegenerateRays,
    kNoStorageFunction,
    kMultiValued,
    kWrongRepresentation,
    kDegenerateDegree,
    kUnstableDenominator,
    kDestabilizingLambda,
    kDegreeDrop,
    kSingularDenominator,
    kNoStabilizingLambda,
    kNonpositiveGain,
    kDegenerateTransformedTf,
    kNonFiniteState,
    kDimensionMismatch,
    kNonConvexCertificate,
    kNoConvergence,
    kPreconditionFailed,
    kNotRealizable,
};

/// Stable upper-case identifier used in CLI diagnostics, e.g. "TRIVIAL_PQI".
[[nodiscard]] std::string_view reason_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace eips
