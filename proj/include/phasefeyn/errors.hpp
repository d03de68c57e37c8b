#pragma once

#include <stdexcept>
#include <string>

namespace phasefeyn {

// Input violates a documented precondition. The CLI maps this to exit code 1.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An operator could not be inverted within the configured condition bound,
// or the computed inverse failed its residual check.
struct SingularOperatorError : std::runtime_error {
    double condition_estimate;
    SingularOperatorError(const std::string& msg, double cond)
        : std::runtime_error(msg), condition_estimate(cond) {}
};

// The pinning Gram matrix satisfies neither admissibility branch
// (positive-definite real part, or vanishing real part with nonzero
// imaginary part).
struct GramViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// det(Id + L(Id+K)^-1) vanished; for the harmonic family this happens at
// and beyond the caustic t = pi/(2 sqrt(k)).
struct VanishingDeterminantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace phasefeyn
