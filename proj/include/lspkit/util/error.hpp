#pragma once

#include <stdexcept>
#include <string>

namespace lspkit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Multi-index outside a tensor's mode sizes.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Point outside the rectangular domain of a grid (no extrapolation).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or failed factorizations.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters, unknown skills, malformed domain definitions.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operator applied in a symbolic state where its preconditions fail.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Skill library is missing one or more trained value functions.
class LibraryError : public Error {
public:
    using Error::Error;
};

/// File could not be parsed or does not follow its schema.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace lspkit
