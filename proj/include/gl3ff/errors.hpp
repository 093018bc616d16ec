#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace gl3 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation hit a singular point of a kernel function.
class PoleError : public Error {
 public:
  PoleError(std::string fn, std::complex<double> x, std::complex<double> y)
      : Error(describe(fn, x, y)), function(std::move(fn)), x(x), y(y) {}

  std::string function;
  std::complex<double> x, y;

 private:
  static std::string describe(const std::string& fn, std::complex<double> x, std::complex<double> y) {
    return "pole in " + fn + "(x, y) at x=(" + std::to_string(x.real()) + "," + std::to_string(x.imag()) +
           ") y=(" + std::to_string(y.real()) + "," + std::to_string(y.imag()) + ")";
  }
};

class SizeError : public Error {
 public:
  using Error::Error;
};

// Zero-mode data requested for a chain whose twist is not trivial.
class TwistError : public Error {
 public:
  using Error::Error;
};

class CardinalityError : public Error {
 public:
  using Error::Error;
};

class CoincidingRootsError : public Error {
 public:
  using Error::Error;
};

class OffShellError : public Error {
 public:
  using Error::Error;
};

class BranchError : public Error {
 public:
  using Error::Error;
};

class ContextError : public Error {
 public:
  using Error::Error;
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, double best) : Error(what), best_residual(best) {}
  double best_residual;
};

class DegenerateJacobianError : public Error {
 public:
  DegenerateJacobianError(const std::string& what, double rcond) : Error(what), condition(rcond) {}
  double condition;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& field, const std::string& what)
      : Error("parse error at '" + field + "': " + what), field(field) {}
  std::string field;
};

}  // namespace gl3
