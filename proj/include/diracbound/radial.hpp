#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "diracbound/boundary_condition.hpp"
#include "diracbound/geometry.hpp"

namespace db {

// Per-mode reduction of the Dirac equation. A spinor of mode `label` is written as
// (f1, i f2) in the rotating frame; the eigen equations are
//   f1' + q1 f1 = lambda f2,    -f2' - (w'/w) f2 + q1 f2 = lambda f1,
// with q1 = w'/(2w) - kt, where kt is the tangential momentum (angular momentum over the
// orbit radius plus the twist connection).
struct RadialMode {
  int n = 2;
  double a = 0.0, b = 1.0;
  bool singularLeft = false;
  bool equatorRight = false;  // right end is the fixed equator of a sphere reflection
  int weightPower = 1;        // w ~ (x - a)^weightPower at a singular left end
  double label = 0.5;         // m (half-integer), mu (nonzero integer) or momentum p
  int multiplicity = 1;
  std::function<double(double)> w, dw, kt;

  double q1(double x) const { return 0.5 * dw(x) / w(x) - kt(x); }
  // Frobenius exponent of f1 at the singular left end.
  double alpha() const { return label - 0.5 * weightPower; }
  std::string describe() const;
};

// Relation imposed on (f1, f2) at one endpoint.
struct EndLine {
  enum class Kind { Line, F2Zero, Free, Empty };
  Kind kind = Kind::Line;
  std::complex<double> c{0.0, 0.0};  // Line: f1 = c f2

  static EndLine line(std::complex<double> c) { return {Kind::Line, c}; }
  static EndLine f2zero() { return {Kind::F2Zero, {0.0, 0.0}}; }
  static EndLine free() { return {Kind::Free, {0.0, 0.0}}; }
  static EndLine empty() { return {Kind::Empty, {0.0, 0.0}}; }
};

// Boundary relation for a boundary circle/sphere whose outward normal is eps * e_x,
// where `tangential` is kt at that end (so the boundary Dirac operator acts as
// +eps*tangential on the upper component and -eps*tangential on the lower one).
EndLine boundary_line(const BoundaryCondition& bc, int eps, double tangential);

// Full per-mode problem: reduction plus endpoint relations.
struct ModeProblem {
  RadialMode mode;
  EndLine left, right;
  int parity = 0;  // sphere sector: +1 / -1 reflection parity, 0 otherwise

  enum class Status { Regular, AllLambda, NoEigenvalues };
  Status status() const;
  bool hermitian() const;  // real endpoint relations
};

// Mode problems for the first `modeCount` modes of each sign (cylinder: momenta with
// |k| < modeCount on each side). The sphere yields both reflection parities per mode.
std::vector<ModeProblem> mode_problems(const DiracBundleSpec& bundle, const BoundaryCondition& bc,
                                       int modeCount);

// Single problem for a specific label (m, mu or momentum index k for the cylinder) and parity.
ModeProblem mode_problem(const DiracBundleSpec& bundle, const BoundaryCondition& bc, double label,
                         int parity = +1);

// Label of the i-th mode for enumeration (i = 0, 1, ...; negative labels by sign).
double mode_label(const DiracBundleSpec& bundle, int index, int sign);

// True if the geometry is handled by per-mode reductions.
bool has_mode_reduction(const GeometrySpec& g);

}  // namespace db
