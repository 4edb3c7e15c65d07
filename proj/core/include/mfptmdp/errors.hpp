#pragma once

#include <stdexcept>
#include <string>

namespace mfptmdp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or matrix shapes do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A model failed validation while being built.
class InvalidModel : public Error {
public:
    using Error::Error;
};

/// Elimination hit a pivot below the singularity threshold.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// An iterative solve needs a non-zero diagonal.
class ZeroDiagonal : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

}  // namespace mfptmdp
