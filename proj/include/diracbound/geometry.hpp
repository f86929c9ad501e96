#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace db {

enum class GeometryKind { FlatTorus2, RoundSphere, UnitDisk, Annulus, Cylinder };

const char* geometry_kind_name(GeometryKind k);

// Lengths are stored unscaled; the homothety factor `scale` multiplies all of them.
// UnitDisk with n = 3 is the round 3-ball; Cylinder with n = 3 is [0,L] x T^2(C,C).
struct GeometrySpec {
  GeometryKind kind = GeometryKind::UnitDisk;
  int n = 2;
  double L1 = 1.0, L2 = 1.0;
  std::array<int, 2> spin{0, 0};
  double radius = 1.0;
  double rho_in = 0.5, rho_out = 1.0;
  double length = 1.0, circumference = 1.0;
  double scale = 1.0;

  double len(double x) const { return scale * x; }
};

GeometrySpec make_torus(double L1, double L2, std::array<int, 2> spin = {0, 0});
GeometrySpec make_sphere(int n, double radius);
GeometrySpec make_disk(double radius, int n = 2);
GeometrySpec make_annulus(double rho_in, double rho_out);
GeometrySpec make_cylinder(double length, double circumference, int spin = 0, int n = 2);

// Generic constructor: parameters by name (L1, L2, spin1, spin2, radius, n, rho_in, rho_out,
// length, circumference, spin). Unknown names are a parameter error.
GeometrySpec make_geometry(GeometryKind kind, const std::map<std::string, double>& params);

void validate(const GeometrySpec& g);

struct BoundaryComponent {
  double meanCurvature = 0.0;  // w.r.t. the outward normal
  double area = 0.0;
  double position = 0.0;       // reduction coordinate of the component
  int outwardSign = 1;         // +1 if the outward normal points along increasing coordinate
};

struct GeometricInvariants {
  double volume = 0.0;
  double boundaryArea = 0.0;
  double scalarCurvature = 0.0;  // constant on every catalog member
  std::vector<BoundaryComponent> boundary;
  bool hasBoundary = false;
  double meanCurvatureMaxAbs() const;
  double boundaryIntegralH() const;
};

GeometricInvariants invariants(const GeometrySpec& g);

GeometrySpec rescale(const GeometrySpec& g, double sigma);

// One-dimensional reduction used by scalar solvers: the symmetric sector of the geometry
// lives on [a,b] with volume density `density` (so that its integral is the volume).
enum class EndKind { Singular, Boundary, Periodic };

struct ReducedDomain {
  double a = 0.0, b = 1.0;
  EndKind left = EndKind::Boundary, right = EndKind::Boundary;
  std::function<double(double)> density;
};

ReducedDomain reduced_domain(const GeometrySpec& g);

// Volume computed by Gauss-Legendre quadrature of the reduced density.
double volume_quadrature(const GeometrySpec& g, int resolution);

struct GaussRule {
  std::vector<double> x, w;
};
// Nodes and weights on [-1,1].
GaussRule gauss_legendre(int n);

// Dirac bundle: model geometry plus a constant-field line-bundle twist B (curvature iB).
struct DiracBundleSpec {
  GeometrySpec geometry;
  double twist = 0.0;  // stored unscaled; effective field is twist / scale^2

  int dim() const { return geometry.n; }
  double field() const { return twist / (geometry.scale * geometry.scale); }
};

DiracBundleSpec rescale(const DiracBundleSpec& b, double sigma);

// Checks the bundle/geometry pair is supported (twists only on flat 2-dimensional members,
// torus flux quantized).
void validate(const DiracBundleSpec& b);

// Flux quantum number B * Area / (2 pi) on the torus.
int torus_flux(const DiracBundleSpec& b);

}  // namespace db
