#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qmoebius {

enum class errc {
    division_by_zero,
    singular_matrix,
    duplicate_points,
    degenerate_input,
    infinite_cross_ratio,
    invariant_mismatch,
    norm_mismatch,
    zero_vector,
    infeasible,
    hypothesis_violation,
    fit_failure,
    generator_exhausted,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::division_by_zero: return "DivisionByZero";
        case errc::singular_matrix: return "SingularMatrix";
        case errc::duplicate_points: return "DuplicatePoints";
        case errc::degenerate_input: return "DegenerateInput";
        case errc::infinite_cross_ratio: return "InfiniteCrossRatio";
        case errc::invariant_mismatch: return "InvariantMismatch";
        case errc::norm_mismatch: return "NormMismatch";
        case errc::zero_vector: return "ZeroVector";
        case errc::infeasible: return "Infeasible";
        case errc::hypothesis_violation: return "HypothesisViolation";
        case errc::fit_failure: return "FitFailure";
        case errc::generator_exhausted: return "GeneratorExhausted";
    }
    return "UnknownError";
}

/// Library error. `reason()` carries a short machine-readable token
/// (e.g. "condition1" for a failed five-point feasibility check),
/// `what()` a human-readable sentence.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& detail, std::string reason = {})
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
          code_(code),
          reason_(std::move(reason)) {}

    errc code() const { return code_; }
    const std::string& reason() const { return reason_; }

private:
    errc code_;
    std::string reason_;
};

} // namespace qmoebius
