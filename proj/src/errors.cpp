#include "diracbound/errors.hpp"

#include <cstdio>

namespace db {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::NoBoundary: return "no-boundary";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Symmetry: return "symmetry";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::IncompleteSearch: return "incomplete-search";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace db
