#pragma once

#include <stdexcept>
#include <string>

namespace curvedray {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on a physical quantity was violated (non-positive
/// temperature, negative height, parameter past a turning point, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A query point lies outside the tetrahedral mesh hull.
class OutsideDomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or version-mismatched input file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Recognized file whose format version this build does not read.
class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

/// File could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Degenerate geometry (coplanar input, zero-volume cell, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// An iterative procedure did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace curvedray
