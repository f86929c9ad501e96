#pragma once

#include <stdexcept>
#include <string>

namespace db {

enum class ErrorKind {
  Dimension,
  Shape,
  Parameter,
  Resolution,
  Capability,
  NoBoundary,
  Argument,
  Symmetry,
  Convergence,
  IncompleteSearch,
  Config,
};

const char* error_kind_name(ErrorKind k);
// Scientific notation with four significant digits.
std::string sci(double x);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + " error: " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries the smallest residual reached before giving up.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double best)
      : Error(ErrorKind::Convergence, msg + " (best residual " + sci(best) + ")"),
        best_residual(best) {}
  double best_residual;
};

}  // namespace db
