#pragma once

#include <stdexcept>
#include <string>

namespace ghost {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter record violates its invariants.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared in an intermediate result.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Node doubling changed a quadrature result by more than the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A grid is too coarse for the structure it has to resolve.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Two grids that must coincide do not.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ghost
