#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diracbound/geometry.hpp"
#include "diracbound/operators.hpp"
#include "diracbound/radial.hpp"

namespace db {

struct EigenResult {
  std::vector<cplx> eigenvalues;        // sorted by (|lambda|, Re, Im)
  std::vector<Eigen::VectorXcd> vectors;  // in the operator's orthonormal basis, when requested
  std::vector<double> residuals;         // ||A v - lambda v|| / ||v||
  std::vector<int> clusterSizes;         // multiplicities of consecutive clusters
  std::string method;
};

// Sort key used everywhere: (|lambda|, Re lambda, Im lambda).
bool eigen_order(cplx a, cplx b);

// Cluster sizes of a sorted eigenvalue list with gap threshold relTol * spectral scale.
std::vector<int> cluster_sizes(const std::vector<cplx>& sorted, double relTol = 1e-6);

// k smallest-|lambda| eigenpairs of a Hermitian operator. Block-diagonal operators are solved
// block by block. Dense path up to size 4096, Lanczos above.
EigenResult hermitian_eigs(const OperatorMatrix& op, int k, double tol, bool wantVectors = false);

// Dense Hermitian eigensolve of a plain matrix (all pairs, ascending by value).
EigenResult dense_hermitian_all(const Eigen::MatrixXcd& A);

// Block Lanczos with full reorthogonalization for the k smallest-|lambda| pairs of a
// Hermitian matrix given by its action; works on A^2 and recovers signs by Rayleigh-Ritz on A.
struct LanczosOptions {
  int blockSize = 8;
  int maxDim = 0;  // 0: the matrix size
  unsigned seed = 12345;
};
EigenResult lanczos_eigs(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& apply, Eigen::Index n,
                         int k, double tol, const LanczosOptions& opts = {});

// All eigenvalues of a general complex matrix (diagnostics only).
std::vector<cplx> general_eigenvalues(const Eigen::MatrixXcd& A);

// Shooting formulation of a per-mode problem.
struct ShootingProblem {
  ModeProblem problem;
  cplx lower{-10.0, -10.0}, upper{10.0, 10.0};  // search rectangle corners
  int steps = 400;                               // RK4 steps of the coarse integration
};

struct DeterminantValue {
  cplx value;       // normalized boundary determinant
  cplx derivative;  // d value / d lambda
};

// Boundary matching determinant at lambda (Richardson-extrapolated RK4 pair).
DeterminantValue shooting_determinant(const ShootingProblem& sp, cplx lambda);

// Maximum relative Cauchy-Riemann defect of the determinant at sample points in the region.
double holomorphy_defect(const ShootingProblem& sp, int samples = 8);

// Winding number of the determinant along the rectangle boundary.
double winding_number(const ShootingProblem& sp, cplx lower, cplx upper);

// All roots in the search rectangle (argument principle + subdivision + Newton), sorted by
// eigen_order and truncated to `count` when count > 0. Throws IncompleteSearch if the
// number of verified roots differs from the winding count.
std::vector<cplx> nonnormal_mode_roots(const ShootingProblem& sp, int count);

// Scalar solvers on the reduced domain (P1 finite elements, density-weighted).
struct RobinResult {
  double value = 0.0;
  Eigen::VectorXd minimizer;  // nodal values, normalized in the density-weighted L2 norm
  std::vector<double> nodes;
};

// inf over int u^2 = 1 of int (g |grad u|^2 + V u^2) + int_boundary beta u^2.
// V and beta are constants (every catalog member has constant kappa and H per component).
RobinResult robin_min(const GeometrySpec& g, double gradCoeff, double zeroOrder,
                      const std::function<double(const BoundaryComponent&)>& boundaryCoeff, int resolution);

// Same pencil restarted from a given initial vector (inverse iteration); used to check the
// |u| invariance of the minimum.
double robin_rayleigh_from(const GeometrySpec& g, double gradCoeff, double zeroOrder,
                           const std::function<double(const BoundaryComponent&)>& boundaryCoeff, int resolution,
                           const Eigen::VectorXd& start);

// Discrete estimate of gamma (n = 3).
double gamma_estimate(const GeometrySpec& g, int resolution);

}  // namespace db
