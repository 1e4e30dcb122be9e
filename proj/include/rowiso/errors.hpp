// rowiso: error types shared across the library.
//
// Every throwing precondition in the public API maps to one of these, so
// callers can distinguish "your input is malformed" (ValidationError,
// ParseError) from "your input fails a structural hypothesis" (the named
// operator-theoretic errors).

#ifndef ROWISO_ERRORS_HPP
#define ROWISO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rowiso {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix-level gates.
struct NotHermitian : Error { using Error::Error; };
struct NotPsd : Error { using Error::Error; };
struct NotContraction : Error { using Error::Error; };
struct NotCoisometry : Error { using Error::Error; };

// Truncated-space gates.
struct DepthTooSmall : Error { using Error::Error; };
struct TruncationOverflow : Error { using Error::Error; };

// Structural hypotheses on wandering subspaces.
struct UNotWandering : Error { using Error::Error; };
struct YNotWandering : Error { using Error::Error; };

// Transfer-function evaluation.
struct SingularResolvent : Error { using Error::Error; };

// Lifting and interaction data.
struct InconsistentLifting : Error { using Error::Error; };
struct NoVacuum : Error { using Error::Error; };

// Input handling.
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace rowiso

#endif  // ROWISO_ERRORS_HPP
