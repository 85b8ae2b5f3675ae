#pragma once

#include <stdexcept>
#include <string>

namespace hsir {

// Bad caller input: wrong shapes, out-of-range indices, invalid parameters.
class ArgumentError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Input data that is well-formed but unusable (non-finite samples, zero-mean
// reference bands, mismatched cubes handed to the metrics).
class DataError : public ArgumentError {
  public:
    using ArgumentError::ArgumentError;
};

// Malformed or inconsistent on-disk cube.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Filesystem failure (open, read, write).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Operation invoked in the wrong solver configuration.
class StateError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace hsir
