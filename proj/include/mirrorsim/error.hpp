#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a device formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Lexical or grammatical problem in netlist text. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ElaborationError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Newton iteration failed. `trace()` holds one line per iteration of the
/// final attempt (max |dV| and KCL residual).
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<std::string> trace, double time = -1.0)
      : Error(what), trace_(std::move(trace)), time_(time) {}
  const std::vector<std::string>& trace() const noexcept { return trace_; }
  /// Simulation time of the failing step, or -1 for a DC solve.
  double time() const noexcept { return time_; }

 private:
  std::vector<std::string> trace_;
  double time_;
};

class NotSettled : public Error {
 public:
  using Error::Error;
};

/// Calibration bracket cannot reach the requested target.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Unknown probe, parameter path, configuration or analysis name.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace mirrorsim
