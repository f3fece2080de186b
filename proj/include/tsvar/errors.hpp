#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsvar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad grid descriptors, inconsistent dimensions, bad files.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Expression syntax error. `column` is 1-based.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& message, std::size_t column)
      : InvalidInput("column " + std::to_string(column) + ": " + message),
        column_(column) {}

  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Evaluation hit ln(x<=0), x/0, 0^negative, or a non-finite value.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A transformed time map t -> T_eps(t, q(t)) that is not strictly increasing.
class NonMonotoneMap : public InvalidInput {
 public:
  NonMonotoneMap(const std::string& message, double eps)
      : InvalidInput(message), eps_(eps) {}

  double eps() const { return eps_; }

 private:
  double eps_;
};

/// Newton failure: no convergence or a singular Jacobian block.
class SolverError : public Error {
 public:
  SolverError(const std::string& message, double last_norm)
      : Error(message), last_norm_(last_norm) {}

  double last_norm() const { return last_norm_; }

 private:
  double last_norm_;
};

}  // namespace tsvar
