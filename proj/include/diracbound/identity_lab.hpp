#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "diracbound/boundary_condition.hpp"
#include "diracbound/clifford.hpp"
#include "diracbound/eigensolve.hpp"
#include "diracbound/fields.hpp"
#include "diracbound/operators.hpp"

namespace db {

struct WeightParams {
  PlaneWaveScalar phi;
  double tau = 0.0;
  double delta = 0.0;
  double r = 0.0;
};

struct IdentityReport {
  std::string identity;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs|
  double scale = 1.0;     // max(|lhs|, |rhs|, 1)
  std::vector<std::pair<double, double>> resolutionSeries;  // (h, residual)
  std::optional<double> order;                              // fitted when a series is present
  std::string note;
};

// Least-squares slope of log(residual) against log(h); points with residual <= floor are dropped.
std::optional<double> fitted_order(const std::vector<std::pair<double, double>>& series, double floor = 1e-300);

// D^2 - (connection Laplacian + curvature). Torus: max entry of the assembled matrices.
// Per-mode geometries: max nodal defect on a compactly supported smooth section of every mode
// label in [-modes, modes), relative to the size of D^2 s, with a refinement series when
// `refine` is set.
IdentityReport check_bochner(const DiracBundleSpec& bundle, int resolution, bool refine = false, int modes = 2);

// Variants: unw, PP2, est1, est11, est2. Flat torus (untwisted) or flat 2-disk; on the disk
// every boundary integral is included. The left side of unw/est* uses the assembled Fourier
// operator (torus) or the plane-wave symbol (disk); the right side is assembled term by term
// from the exact jets. PP2 is pointwise and reports the largest defect.
IdentityReport check_weighted_identity(const DiracBundleSpec& bundle, const PlaneWaveSpinor& s,
                                       const WeightParams& w, const TwistorParams& tp,
                                       const std::string& variant, int resolution);

// Right-hand side of est1 against est2 as delta -> 0 with xi = delta / r; reports the slope of
// |RHS_est1 - RHS_est2| in delta over delta in {1e-1, ..., 1e-4}.
IdentityReport check_est2_limit(const DiracBundleSpec& bundle, const PlaneWaveSpinor& s, const WeightParams& w,
                                int resolution);

// Boundary section projected onto the condition `bc` at `resolution` points of each boundary
// circle. Variants: b1, b2 (MIT or local), DD, D (any section), maps (modified APS, bc.b).
// For maps the random trace is drawn from `rng`.
IdentityReport check_boundary_identity(const DiracBundleSpec& bundle, const BoundaryCondition& bc,
                                       const PlaneWaveSpinor& s, const PlaneWaveScalar& phi, double tau,
                                       double delta, const std::string& variant, int resolution,
                                       std::mt19937_64* rng = nullptr);

// Same identity over resolutions {64, 128, 256, 512} with the fitted order.
IdentityReport boundary_identity_series(const DiracBundleSpec& bundle, const BoundaryCondition& bc,
                                        const PlaneWaveSpinor& s, const PlaneWaveScalar& phi, double tau,
                                        double delta, const std::string& variant);

// Curvature relation R s = (n-1) n a^2 s for the ground pair of `result` on `op`; the note
// carries the Killing residual that conditions it.
IdentityReport check_ri(const DiracBundleSpec& bundle, const OperatorMatrix& op, const EigenResult& result, double a);

// Compares sigma * lambda_k(rescaled) with lambda_k, the curvature endomorphism with sigma^-2
// times the original and the mean curvature with sigma^-1 times the original (relative).
IdentityReport check_scaling(const DiracBundleSpec& bundle, const BoundaryCondition& bc, double sigma, int k,
                             int resolution = 256);

}  // namespace db
