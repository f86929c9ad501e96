#pragma once

#include <array>
#include <random>
#include <vector>

#include "diracbound/clifford.hpp"
#include "diracbound/geometry.hpp"

namespace db {

// Value and first derivatives of a spinor at a point of a flat domain (Cartesian frame).
struct SpinorJet {
  Vec2 s;
  std::array<Vec2, 2> d;  // d/dx, d/dy
};

// Value, gradient and Laplacian of a real function.
struct ScalarJet {
  double f = 0.0;
  std::array<double, 2> grad{0.0, 0.0};
  double lap = 0.0;
};

// Finite sum of plane waves c_k exp(i p_k . x), exact derivatives.
struct PlaneWaveSpinor {
  std::vector<std::array<double, 2>> p;
  std::vector<Vec2> c;
  SpinorJet at(double x, double y) const;
};

// Finite sum A_k cos(p_k . x) + B_k sin(p_k . x) plus a constant.
struct PlaneWaveScalar {
  double constant = 0.0;
  std::vector<std::array<double, 2>> p;
  std::vector<double> A, B;
  ScalarJet at(double x, double y) const;
};

// Band-limited random fields on the flat torus of `g` (modes |k_i| <= band, spin-shifted for
// spinors, periodic for scalars), amplitudes decaying like exp(-0.3 |k|^2).
PlaneWaveSpinor random_torus_spinor(const GeometrySpec& g, int band, std::mt19937_64& rng);
PlaneWaveScalar random_torus_scalar(const GeometrySpec& g, int band, double amplitude, std::mt19937_64& rng);

// Random plane-wave fields with `waves` terms and wave numbers of size ~ `scale`.
PlaneWaveSpinor random_plane_spinor(int waves, double scale, std::mt19937_64& rng);
PlaneWaveScalar random_plane_scalar(int waves, double scale, double amplitude, std::mt19937_64& rng);

// Quadrature points of a flat two-dimensional domain.
struct QuadPoint {
  double x, y, w;
};
// Points of a boundary circle with unit outward normal and unit tangent e (counterclockwise
// for the outer circle, so that (nu, e) is positively oriented).
struct BoundaryPoint {
  double x, y, w;
  std::array<double, 2> nu, e;
};

std::vector<QuadPoint> torus_quadrature(const GeometrySpec& g, int perSide);
std::vector<QuadPoint> disk_quadrature(const GeometrySpec& g, int radial, int angular);
std::vector<BoundaryPoint> disk_boundary(const GeometrySpec& g, int angular);

// Clifford multiplication by a tangent vector (n = 2 representation).
Vec2 cliff(const std::array<double, 2>& X, const Vec2& s);
// Dirac operator from a jet: sum gamma_j d_j s.
Vec2 dirac_of(const SpinorJet& j);

}  // namespace db
