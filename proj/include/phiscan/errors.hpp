#pragma once

#include <stdexcept>
#include <string>

namespace phiscan {

// Bad user input / configuration. CLI maps this to exit code 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A query whose answer is not determined by the configured prime basis
// (e.g. a factorial cutoff running past the largest basis prime).
struct BasisOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken internal invariant (non-prime residual, moment mismatch, ...).
// CLI maps this to exit code 3.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace phiscan
