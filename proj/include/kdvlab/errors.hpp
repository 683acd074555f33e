#pragma once

#include <stdexcept>
#include <string>

namespace kdvlab {

/// Precondition or argument violation (bad grid, mismatched lengths, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A spectral product whose exact support exceeds the grid Nyquist was
/// requested with the exact policy.
class AliasingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The band decomposition of a Miura image failed its residual tolerance.
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time integration aborted (non-finite state, or drift guard exhausted).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file or constraint problem; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kdvlab
