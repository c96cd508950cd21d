#pragma once

#include <stdexcept>
#include <string>

namespace anderson {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: invalid sizes, out-of-range intervals, malformed configuration.
/// The CLI maps this family to exit status 2.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an experiment does not hold
/// (e.g. the window is too narrow for the requested system size).
class PreconditionViolation : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// lambda == 0 makes every transfer matrix the same elliptic element, so the
/// projective walk has no unique stationary measure.
class DegenerateCoupling : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A numerical routine failed to converge or produced a non-finite value.
/// The CLI maps this family to exit status 3.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace anderson
