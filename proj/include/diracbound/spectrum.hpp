#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diracbound/boundary_condition.hpp"
#include "diracbound/eigensolve.hpp"
#include "diracbound/operators.hpp"

namespace db {

enum class SpectrumMethod { Auto, Staggered, Shooting };

struct SpectrumOptions {
  BoundaryCondition bc;
  int k = 6;
  int resolution = 256;
  int modes = 4;             // per-mode geometries: labels of each sign
  double tol = 1e-8;         // eigenpair residual tolerance (relative to the operator scale)
  SpectrumMethod method = SpectrumMethod::Auto;
  bool wantGround = false;   // keep operator and vector of the smallest-modulus eigenvalue
};

struct SpectralValue {
  cplx value;
  std::optional<double> mode;  // label (cylinder: momentum index)
  int parity = 0;
  int multiplicity = 1;
  double residual = 0.0;
  std::string method;
};

struct SpectrumResult {
  std::vector<SpectralValue> values;  // sorted by eigen_order, truncated to k
  std::vector<int> clusterSizes;
  std::vector<std::string> notes;     // e.g. modes whose condition leaves every lambda admissible
  std::optional<OperatorMatrix> groundOp;
  std::optional<EigenResult> ground;  // single pair on groundOp
};

// Lowest k eigenvalues over modes (per-mode geometries) or the full Fourier operator (torus).
SpectrumResult compute_spectrum(const DiracBundleSpec& bundle, const SpectrumOptions& opts);

// Roots of a single mode problem with |lambda| <= radius (shooting).
std::vector<cplx> mode_roots(const ModeProblem& problem, double radius, bool realAxis, int steps = 400);

// Parse helpers shared with the command line.
SpectrumMethod parse_method(const std::string& s);

}  // namespace db
