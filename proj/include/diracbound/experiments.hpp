#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diracbound/bounds.hpp"
#include "diracbound/identity_lab.hpp"
#include "diracbound/spectrum.hpp"

namespace db {

struct BoundOptions {
  Theorem theorem = Theorem::T1;
  BoundaryCondition bc;        // MIT/local for T1 and Thm2; b and sign for the APS families
  int resolution = 256;        // per-mode spectrum and scalar minimization
  int modes = 4;
  double tol = 1e-8;
  std::optional<double> gamma; // volume bounds; estimated when absent
  SpectrumMethod method = SpectrumMethod::Auto;
  bool estimateError = true;   // compare with half resolution for the reported tolerance
};

// Boundary condition a theorem is evaluated under (closed geometries: none).
BoundaryCondition theorem_condition(const DiracBundleSpec& bundle, const BoundOptions& opts);

// Bound value together with the smallest |lambda|^2 and equality diagnostics of the ground pair.
BoundReport evaluate_bound(const DiracBundleSpec& bundle, const BoundOptions& opts);

// Bound value only.
double bound_rhs(const DiracBundleSpec& bundle, const BoundOptions& opts);

struct CheckResult {
  IdentityReport report;
  std::string criterion;   // threshold in words
  std::string provenance;  // origin of the reference value
  bool pass = false;
};

struct SuiteOptions {
  std::string suite = "all";  // identities, boundary, scaling, all
  std::uint64_t seed = 1;
  int instances = 100;        // random instances per identity variant
  double sigma = 2.0;
  std::optional<DiracBundleSpec> bundle;  // geometry of the run; defaults per suite
};

std::vector<CheckResult> run_suite(const SuiteOptions& opts);

// Refinement study of one quantity over resolutions base * 2^i, i < levels.
struct ConvergencePoint {
  int resolution = 0;
  double h = 0.0;
  double value = 0.0;
  double residual = 0.0;  // |value - next finer value| (quantities with an exact target: defect)
};

struct ConvergenceStudy {
  std::string quantity;
  std::vector<ConvergencePoint> points;
  std::optional<double> order;
};

// Quantities: lambda (smallest |lambda| under bc), bochner, b1, DD, D.
ConvergenceStudy run_convergence(const DiracBundleSpec& bundle, const BoundaryCondition& bc,
                                 const std::string& quantity, int baseResolution, int levels, int modes,
                                 std::uint64_t seed);

}  // namespace db
