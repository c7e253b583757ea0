#pragma once

#include <stdexcept>
#include <string>

namespace riskcast {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (bad delimiter, unparseable field); message carries the row number.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a data invariant (duplicate or non-monotone dates).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Argument outside an operation's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A series whose span cannot be mapped onto the requested grid.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown inside an otherwise valid computation (singular regression, collinearity).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Mismatched or incomplete caller-supplied inputs (date misalignment, missing evidence).
class InputError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for the given model or configuration.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Experiment staging failure (insufficient history for the configured windows).
class StagingError : public Error {
public:
    using Error::Error;
};

} // namespace riskcast
