#pragma once

#include <stdexcept>
#include <string>

namespace ptdirac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Family parameters violate an invariant (e.g. no confining oscillator).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a function (negative Bessel argument,
/// sampled family evaluated off its grid, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller-side precondition not met (asymmetric grid for a parity check,
/// non-decaying shooting tails, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A_+ = M + iP vanishes where the constrained vector potential is needed.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, double location)
        : Error(what), location_(location) {}

    double location() const noexcept { return location_; }

private:
    double location_;
};

/// Iteration or quadrature failed to converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace ptdirac
