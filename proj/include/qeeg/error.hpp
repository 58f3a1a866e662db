#pragma once

#include <stdexcept>
#include <string>

namespace qeeg {

/// Base of every error thrown by the library. Each subclass maps to one
/// diagnostic category so callers (and the CLI exit summary) can tell a bad
/// argument from bad data from a numerically degenerate input.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input data violates a domain invariant (non-finite value, duplicate label, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numeric or enumerated parameter is out of its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The data is well-formed but carries no usable information
/// (zero-power segment, zero variance, single class).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// File system or parse failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qeeg
