#pragma once

#include <stdexcept>
#include <string>

namespace toepca {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad parameters, broken invariants, malformed files.
struct ValidationError : Error {
    using Error::Error;
};

/// Shape mismatch between operands.
struct DimensionError : Error {
    using Error::Error;
};

/// A numerical routine failed to reach its accuracy target.
/// `residual` carries the achieved residual for diagnostics.
struct AccuracyError : Error {
    double residual;
    AccuracyError(const std::string& what, double achieved)
        : Error(what), residual(achieved) {}
};

/// Shift-invariance system has rank below the requested state dimension.
struct DegenerateBasisError : Error {
    using Error::Error;
};

/// A matrix factorization step is too ill-conditioned to trust.
struct ConditioningError : Error {
    using Error::Error;
};

}  // namespace toepca
