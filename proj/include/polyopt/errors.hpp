#pragma once

#include <stdexcept>
#include <string>

namespace polyopt {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: dimension mismatches, bad indices, bad degrees.
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

// Text-level parse failure (problem files, case files).
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = -1)
      : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Requested relaxation order below the minimum admissible order.
class OrderTooLowError : public InputError {
 public:
  explicit OrderTooLowError(const std::string& msg) : InputError(msg) {}
};

// Jacobian numerically singular where an invertible one is required.
class SingularJacobianError : public Error {
 public:
  explicit SingularJacobianError(const std::string& msg, double sigma_min = 0.0)
      : Error(msg), sigma_min_(sigma_min) {}
  double sigma_min() const { return sigma_min_; }

 private:
  double sigma_min_;
};

// Active constraint gradients rank deficient (Fletcher system degenerate).
class DegenerateConstraintsError : public Error {
 public:
  explicit DegenerateConstraintsError(const std::string& msg) : Error(msg) {}
};

// A specialized formula was applied outside its admissible problem class.
class WrongFormError : public InputError {
 public:
  explicit WrongFormError(const std::string& msg) : InputError(msg) {}
};

// Moment vector unusable for point extraction (mass non-positive).
class DegenerateMomentsError : public Error {
 public:
  explicit DegenerateMomentsError(const std::string& msg) : Error(msg) {}
};

// First-order SDP solver diverged (residual blow-up).
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace polyopt
