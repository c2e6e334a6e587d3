#pragma once

#include <stdexcept>
#include <string>

namespace kerrline {

/// Bad user input: malformed config, schema violation, invariant violation.
/// The message names the offending field path.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: root finding, convergence, internal identity checks.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kerrline
