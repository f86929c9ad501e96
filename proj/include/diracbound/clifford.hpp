#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "diracbound/geometry.hpp"

namespace db {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

// Gamma matrices with e_i e_j + e_j e_i = -2 delta_ij.
struct CliffordRep {
  int dim = 2;
  int rank = 2;
  std::vector<Mat2> gammas;

  // Product of all gamma matrices times i^{floor((n+1)/2)}; the complex volume element.
  Mat2 chirality() const;
};

CliffordRep build_clifford(int n);

Vec2 clifford_mult(const CliffordRep& rep, const std::vector<double>& X, const Vec2& s);
Mat2 clifford_matrix(const CliffordRep& rep, const std::vector<double>& X);

struct CurvatureEndo {
  Mat2 value;
  double kappa = 0.0;
};

// Point in reduced coordinates; every catalog bundle has a homogeneous curvature term, so the
// point only feeds the domain check.
struct Point {
  std::vector<double> x;
};

CurvatureEndo curvature_endomorphism(const DiracBundleSpec& bundle, const Point& x);
// Same matrix without the domain check.
CurvatureEndo curvature_endomorphism(const DiracBundleSpec& bundle);

// Eigenvalues of a 2x2 Hermitian matrix by the closed form, ascending.
std::array<double, 2> hermitian2_eigenvalues(const Mat2& m);

struct TwistorParams {
  double eta1 = 1.0, eta2 = 0.0;
  int n = 2;
  double normSq = 1.0;
  double xi = 0.0;
};

TwistorParams twistor_params(double eta1, double eta2, int n);

}  // namespace db
