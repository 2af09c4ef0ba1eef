#pragma once

#include <stdexcept>
#include <string>

namespace fufs {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arguments outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// M = 1: S' is identically 1 and Fs is unbounded.
class DegenerateError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An iterative method failed to converge within its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed input text (FASTA, cache files).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A request would exceed a configured memory or size budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// S' or T' rounded to 0 or 1 at working precision; Fs would be +-infinity.
class SaturationError : public Error {
public:
    SaturationError(const std::string& what, int sign) : Error(what), sign_(sign) {}
    /// Sign of the unbounded Fs: +1 when S' saturated at 1, -1 when at 0.
    [[nodiscard]] int sign() const noexcept { return sign_; }

private:
    int sign_;
};

}  // namespace fufs
