#pragma once

#include <stdexcept>
#include <string>

namespace hamspec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or precondition mismatch on a matrix-kernel or model operation.
struct ContractViolation : Error {
    using Error::Error;
};

// A pivot fell below the singularity threshold during factorization.
struct SingularMatrix : Error {
    std::size_t pivot_index;
    SingularMatrix(const std::string& msg, std::size_t idx)
        : Error(msg), pivot_index(idx) {}
};

// No positive-definite solution Gram window found up to the search cap.
struct DefinitenessNotFound : Error {
    using Error::Error;
};

// Gram-eigenvalue growth could not be separated into bounded/divergent.
struct ClassificationAmbiguous : Error {
    using Error::Error;
};

// d+ != d-: the minimal subspace admits no self-adjoint extension.
struct NoSelfAdjointExtension : Error {
    using Error::Error;
};

// A tail sum failed the Cauchy criterion within the horizon cap.
struct TailDivergence : Error {
    using Error::Error;
};

struct InvalidBoundaryCondition : Error {
    using Error::Error;
};

// The requested spectral point is an eigenvalue of the problem at hand.
struct ZIsEigenvalue : Error {
    using Error::Error;
};

struct InternalConsistency : Error {
    using Error::Error;
};

}  // namespace hamspec
