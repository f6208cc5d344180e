#pragma once

#include <stdexcept>
#include <string>

namespace qms {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failures
struct NonConvergence : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct SingularReference : Error { using Error::Error; };
struct QuadratureBudgetExceeded : Error { using Error::Error; };
struct BracketNotFound : Error { using Error::Error; };
struct NotReached : Error { using Error::Error; };

// Structural failures
struct DimensionMismatch : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct AlgebraClosureFailure : Error { using Error::Error; };
struct ModularMismatch : Error { using Error::Error; };
struct PreconditionFailed : Error { using Error::Error; };
struct NotErgodic : Error { using Error::Error; };

// Bad user input (model specs, config)
struct SpecParseError : Error { using Error::Error; };

}  // namespace qms
