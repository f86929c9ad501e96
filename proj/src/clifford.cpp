#include "diracbound/clifford.hpp"

#include <cmath>
#include <numbers>

#include "diracbound/errors.hpp"

namespace db {

namespace {
const cplx I(0.0, 1.0);

Mat2 pauli(int k) {
  Mat2 m = Mat2::Zero();
  switch (k) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I, I, 0; break;
    case 3: m << 1, 0, 0, -1; break;
  }
  return m;
}
}  // namespace

CliffordRep build_clifford(int n) {
  if (n != 2 && n != 3) throw Error(ErrorKind::Dimension, "Clifford representations exist for n = 2, 3 only");
  CliffordRep rep;
  rep.dim = n;
  rep.rank = 2;
  for (int k = 1; k <= n; ++k) rep.gammas.push_back(I * pauli(k));
  return rep;
}

Mat2 CliffordRep::chirality() const {
  Mat2 prod = Mat2::Identity();
  for (const auto& g : gammas) prod = prod * g;
  const int p = (dim + 1) / 2;
  cplx phase = 1.0;
  for (int i = 0; i < p; ++i) phase *= I;
  return phase * prod;
}

Mat2 clifford_matrix(const CliffordRep& rep, const std::vector<double>& X) {
  if (static_cast<int>(X.size()) != rep.dim)
    throw Error(ErrorKind::Shape, "vector length does not match the Clifford dimension");
  Mat2 m = Mat2::Zero();
  for (int i = 0; i < rep.dim; ++i) m += X[i] * rep.gammas[i];
  return m;
}

Vec2 clifford_mult(const CliffordRep& rep, const std::vector<double>& X, const Vec2& s) {
  return clifford_matrix(rep, X) * s;
}

std::array<double, 2> hermitian2_eigenvalues(const Mat2& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  const double off = std::abs(m(0, 1));
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), off);
  return {mean - rad, mean + rad};
}

CurvatureEndo curvature_endomorphism(const DiracBundleSpec& bundle) {
  validate(bundle);
  const auto inv = invariants(bundle.geometry);
  const int n = bundle.dim();
  const CliffordRep rep = build_clifford(n);
  // Curvature 2-form entries R_ij: the spin part contributes R/4 via the Lichnerowicz relation;
  // the twist contributes i*B in the (1,2) plane.
  Mat2 value = (inv.scalarCurvature / 4.0) * Mat2::Identity();
  const double B = bundle.field();
  if (B != 0.0) {
    Mat2 twist = Mat2::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        if (i == j) continue;
        const cplx Rij = (i == 0 ? 1.0 : -1.0) * I * B;
        twist += rep.gammas[i] * rep.gammas[j] * Rij;
      }
    value += 0.5 * twist;
  }
  CurvatureEndo out;
  out.value = value;
  out.kappa = hermitian2_eigenvalues(value)[0];
  return out;
}

CurvatureEndo curvature_endomorphism(const DiracBundleSpec& bundle, const Point& x) {
  const ReducedDomain d = reduced_domain(bundle.geometry);
  if (!x.x.empty()) {
    const double r = x.x[0];
    const double tol = 1e-12 * std::max(1.0, std::abs(d.b));
    if (r < d.a - tol || r > d.b + tol)
      throw Error(ErrorKind::Argument, "point lies outside the geometry's domain");
  }
  return curvature_endomorphism(bundle);
}

TwistorParams twistor_params(double eta1, double eta2, int n) {
  if (eta1 == 0.0 && eta2 == 0.0) throw Error(ErrorKind::Parameter, "twistor parameter eta must be nonzero");
  if (n < 2) throw Error(ErrorKind::Dimension, "twistor parameters need n >= 2");
  TwistorParams t;
  t.eta1 = eta1;
  t.eta2 = eta2;
  t.n = n;
  t.normSq = eta1 * eta1 - 2.0 * eta1 * eta2 + n * eta2 * eta2;
  t.xi = (n * eta2 * eta2 - 2.0 * eta1 * eta2) / t.normSq;
  return t;
}

}  // namespace db
