#pragma once

#include <stdexcept>
#include <string>

namespace hmmorder {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside its mathematical domain (non-finite value, alpha not in (0,1), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Dimension or shape mismatch between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed or produced a non-finite value.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A matrix expected to be positive semi-definite has an eigenvalue below the tolerance floor.
class NotPsdError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Input data cannot support the requested computation (constant series, zero spread).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Structural property violated, e.g. a reducible transition matrix.
class StructureError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration (bad flag values, bandwidth exponent outside the consistency range).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. The message carries the offending line number.
class ParseError : public Error {
public:
    using Error::Error;
};

/// The quadrature grid is too coarse for the requested accuracy.
class OracleResolutionError : public Error {
public:
    using Error::Error;
};

}  // namespace hmmorder
