#pragma once

#include <stdexcept>
#include <string>

namespace implicitreg {

// Base class of everything this library throws. The module tag ("graph",
// "numerics", ...) is prepended to the message so CLI output is attributable.
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Caller-side contract violation: bad parameters, malformed input files.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The numbers did not work out: non-convergence, bracket failure, a result
// that violates its own invariants.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace implicitreg
