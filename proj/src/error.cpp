#include "eips/error.hpp"

namespace eips {

std::string_view reason_code(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::kInvalidInput: return "INVALID_INPUT";
        case ErrorCode::kTrivialPqi: return "TRIVIAL_PQI";
        case ErrorCode::kSingularTransform: return "SINGULAR_TRANSFORM";
        case ErrorCode::kDegenerateRays: return "DEGENERATE_RAYS";
        case ErrorCode::kNoStorageFunction: return "NO_STORAGE_FUNCTION";
        case ErrorCode::kMultiValued: return "MULTI_VALUED";
        case ErrorCode::kWrongRepresentation: return "WRONG_REPRESENTATION";
        case ErrorCode::kDegenerateDegree: return "DEGENERATE_DEGREE";
        case ErrorCode::kUnstableDenominator: return "UNSTABLE_DENOMINATOR";
        case ErrorCode::kDestabilizingLambda: return "DESTABILIZING_LAMBDA";
        case ErrorCode::kDegreeDrop: return "DEGREE_DROP";
        case ErrorCode::kSingularDenominator: return "SINGULAR_DENOMINATOR_1P2LM";
        case ErrorCode::kNoStabilizingLambda: return "NO_STABILIZING_LAMBDA";
        case ErrorCode::kNonpositiveGain: return "NONPOSITIVE_GAIN";
        case ErrorCode::kDegenerateTransformedTf: return "DEGENERATE_TRANSFORMED_TF";
        case ErrorCode::kNonFiniteState: return "NON_FINITE_STATE";
        case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
        case ErrorCode::kNonConvexCertificate: return "NON_CONVEX_CERTIFICATE";
        case ErrorCode::kNoConvergence: return "NO_CONVERGENCE";
        case ErrorCode::kPreconditionFailed: return "PRECONDITION_FAILED";
        case ErrorCode::kNotRealizable: return "NOT_REALIZABLE";
    }
    return "UNKNOWN";
}

}  // namespace eips
