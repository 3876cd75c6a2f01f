#ifndef FQHE_ERRORS_HPP
#define FQHE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fqhe {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid input data or configuration: callers can fix these without
/// touching any numerics. CLI maps this family to exit code 2.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not deliver its contract at the requested
/// budget or tolerance. CLI maps this family to exit code 1.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// --- theta kernel ---

/// Im(tau) <= 0 or Im(Omega) not positive definite: the series diverges.
class NonconvergentDomain : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// The certified truncation bound cannot reach the requested tolerance
/// within the configured term cap.
class ToleranceUnachievable : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

// --- integration ---

class GridTooLarge : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Richardson consistency check between step h and 2h failed.
class GridTooCoarse : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Too few sample points survived an exclusion rule.
class DegenerateSampling : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

// --- Wen datum validation ---

class WenValidationError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class NotSymmetric : public WenValidationError {
public:
    using WenValidationError::WenValidationError;
};

class NotPositiveDefinite : public WenValidationError {
public:
    using WenValidationError::WenValidationError;
};

class MixedParityDiagonal : public WenValidationError {
public:
    using WenValidationError::WenValidationError;
};

/// K * n_vec is not a positive constant multiple of (1,...,1).
class NoUniformD : public WenValidationError {
public:
    using WenValidationError::WenValidationError;
};

class NonpositiveU : public WenValidationError {
public:
    using WenValidationError::WenValidationError;
};

} // namespace fqhe

#endif
