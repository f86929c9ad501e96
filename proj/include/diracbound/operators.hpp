#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diracbound/boundary_condition.hpp"
#include "diracbound/clifford.hpp"
#include "diracbound/geometry.hpp"
#include "diracbound/radial.hpp"

namespace db {

enum class Symmetry { Hermitian, SkewHermitian, General };

const char* symmetry_name(Symmetry s);

// Layout of the unknowns of an assembled operator.
//  Fourier: orthonormal plane-wave (or Landau-level) coefficients, two spinor components each.
//  Staggered: f1 at cell centres, f2 at nodes of a per-mode radial grid.
//  Boundary: Cartesian spinor values at equispaced points of each boundary circle.
enum class Layout { Fourier, Staggered, Boundary };

struct SpinorField {
  Layout layout = Layout::Staggered;
  std::vector<double> coords;   // coordinate of each unknown
  std::vector<int> component;   // spinor component (0 or 1) of each unknown
  Eigen::VectorXd weights;      // quadrature weight of each unknown
  Eigen::VectorXcd values;
  // Boundary traces (f1, f2) for staggered fields; empty when unused.
  std::optional<std::pair<std::complex<double>, std::complex<double>>> traceLeft, traceRight;

  double norm() const;
};

struct OperatorMatrix {
  std::string what;  // "dirac", "laplacian", "curvature", "boundary-dirac"
  Layout layout = Layout::Staggered;
  // Entries in the quadrature-orthonormal basis: entries = W^{1/2} K W^{-1/2} where K acts on
  // nodal values and W holds the quadrature weights.
  Eigen::MatrixXcd entries;
  Eigen::VectorXd weights;
  Symmetry symmetry = Symmetry::Hermitian;
  std::optional<BoundaryCondition> bc;
  std::optional<double> modeIndex;
  int parity = 0;
  int multiplicity = 1;
  ModeProblem::Status status = ModeProblem::Status::Regular;
  std::vector<double> coords;
  std::vector<int> component;
  // Block-diagonal structure as (offset, size); empty means a single block.
  std::vector<std::pair<int, int>> blocks;
  // Cell size of staggered grids and the resolution used for assembly.
  double h = 0.0;
  int resolution = 0;

  Eigen::Index size() const { return entries.rows(); }
  // Action on nodal values (undoes the weight symmetrization).
  Eigen::VectorXcd applyNodal(const Eigen::VectorXcd& v) const;
};

// Checks the symmetry flag against the entries (relative 1e-12).
bool check_symmetry(const OperatorMatrix& op, double relTol = 1e-12);

OperatorMatrix assemble_dirac(const DiracBundleSpec& bundle, int resolution,
                              std::optional<double> mode = std::nullopt, int parity = +1);
OperatorMatrix assemble_connection_laplacian(const DiracBundleSpec& bundle, int resolution,
                                             std::optional<double> mode = std::nullopt, int parity = +1);
// Curvature endomorphism as an operator on the same unknowns.
OperatorMatrix assemble_curvature(const DiracBundleSpec& bundle, int resolution,
                                  std::optional<double> mode = std::nullopt, int parity = +1);

// Per-mode staggered Dirac operator with the endpoint relations of the problem built in.
OperatorMatrix assemble_mode_dirac(const ModeProblem& problem, int resolution);
OperatorMatrix assemble_mode_laplacian(const ModeProblem& problem, const DiracBundleSpec& bundle,
                                       int resolution);

// Boundary Dirac operator on every boundary circle, Cartesian frame, Fourier-spectral in the
// tangential direction. Unknowns are ordered (circle, point, component).
OperatorMatrix boundary_dirac(const DiracBundleSpec& bundle, int resolution);

// Imposes a boundary condition on a per-mode Dirac operator assembled without one.
OperatorMatrix apply_bc(const OperatorMatrix& op, const BoundaryCondition& bc,
                        const std::optional<OperatorMatrix>& boundaryDirac, const DiracBundleSpec& bundle,
                        int resolution);

// |int <D s1,s2> - int <s1,D s2> - int_boundary <nu s1, s2>| with the operator's quadrature.
double ibp_residual(const OperatorMatrix& op, const DiracBundleSpec& bundle, const SpinorField& s1,
                    const SpinorField& s2);

// Samples a smooth per-mode field (f1, f2 given as functions) on the operator's grid,
// including boundary traces.
SpinorField sample_mode_field(const OperatorMatrix& op, const std::function<std::complex<double>(double)>& f1,
                              const std::function<std::complex<double>(double)>& f2, double a, double b);

// Radial reduction behind a per-mode operator (mode label and parity taken from the operator).
RadialMode operator_mode(const DiracBundleSpec& bundle, const OperatorMatrix& op);
// Mode label as accepted by mode_problem (the cylinder index rather than its momentum).
double operator_label(const DiracBundleSpec& bundle, const OperatorMatrix& op);

// Torus Fourier modes used by the untwisted assembly, in the order of the blocks.
struct TorusMode {
  int k1, k2;
  double p1, p2;
};
std::vector<TorusMode> torus_modes(const DiracBundleSpec& bundle, int resolution);

// Plain-text triplet export: one "row col re im" line per nonzero entry.
std::string export_triplets(const OperatorMatrix& op, double dropTol = 0.0);

}  // namespace db
