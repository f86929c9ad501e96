#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diracbound/eigensolve.hpp"
#include "diracbound/geometry.hpp"
#include "diracbound/operators.hpp"

namespace db {

enum class Theorem { T1, Thm2, ThmAPS, ThmModAPS, VolAPS, VolModAPS };

const char* theorem_name(Theorem t);
Theorem parse_theorem(const std::string& s);  // t1, thm2, aps, maps, volaps, volmaps

struct EqualityDiagnostics {
  std::optional<double> killingResidual;  // empty when no discrete Killing operator is available
  double curvatureResidual = 0.0;
  double meanCurvatureMax = 0.0;
  double kappaRelation = 0.0;
};

struct BoundReport {
  Theorem theorem = Theorem::T1;
  double lhs = 0.0;   // lambda^2 (or |lambda|^2) of the smallest-modulus eigenvalue
  double rhs = 0.0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool hypothesesOk = true;
  std::string hypotheses;  // human-readable account of the checked hypotheses
  std::optional<EqualityDiagnostics> equality;
};

// Smallest eigenvalue of the curvature endomorphism (constant on every catalog bundle).
double curvature_kappa(const DiracBundleSpec& bundle);

double bound_t1(const DiracBundleSpec& bundle);
double bound_thm2(const DiracBundleSpec& bundle, int resolution = 256);
double bound_aps(const DiracBundleSpec& bundle, double b, int resolution = 256);
double bound_maps(const DiracBundleSpec& bundle, double b, int resolution = 256);
double sobolev_constant(int n);

// Volume bounds; lhs is filled from `lambdaSq` when given.
BoundReport bound_volume(const DiracBundleSpec& bundle, double b, double gamma, bool modified,
                         std::optional<double> lambdaSq = std::nullopt);

struct NeumannWeight {
  std::vector<double> nodes;   // reduced coordinate
  std::vector<double> values;  // phi at the nodes, density-weighted mean zero
  double constant = 0.0;       // right-hand constant of the equation
  double residual = 0.0;
  int iterations = 0;
};

NeumannWeight solve_neumann_weight(const DiracBundleSpec& bundle, int resolution = 256);

// Diagnostics of the ground pair (eigenvalues[0], vectors[0]) of `result` computed on `op`.
EqualityDiagnostics equality_diagnostics(const DiracBundleSpec& bundle, const OperatorMatrix& op,
                                         const EigenResult& result);

// Killing residual of a per-mode n = 2 eigenvector (staggered layout) or of a torus vector.
double killing_residual(const DiracBundleSpec& bundle, const OperatorMatrix& op, const Eigen::VectorXcd& v,
                        cplx lambda);

// Least-squares constant a in grad_X s = a X.s for the same vectors.
double fitted_killing_constant(const DiracBundleSpec& bundle, const OperatorMatrix& op, const Eigen::VectorXcd& v);

}  // namespace db
