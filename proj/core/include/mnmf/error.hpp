#pragma once

#include <stdexcept>

namespace mnmf {

// Dimension mismatches and out-of-range parameters are reported with
// std::invalid_argument. The two classes below cover the remaining failure
// modes and map onto distinct CLI exit codes.

/// Malformed input files or requests that the given data cannot satisfy.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine met a degenerate or non-finite quantity.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mnmf
