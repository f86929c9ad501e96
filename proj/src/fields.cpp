#include "diracbound/fields.hpp"

#include <cmath>

#include "diracbound/errors.hpp"

namespace db {

namespace {

const cplx I(0.0, 1.0);

double normal(std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(rng);
}

}  // namespace

SpinorJet PlaneWaveSpinor::at(double x, double y) const {
  SpinorJet j;
  j.s.setZero();
  j.d[0].setZero();
  j.d[1].setZero();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec2 v = c[k] * std::exp(I * (p[k][0] * x + p[k][1] * y));
    j.s += v;
    j.d[0] += I * p[k][0] * v;
    j.d[1] += I * p[k][1] * v;
  }
  return j;
}

ScalarJet PlaneWaveScalar::at(double x, double y) const {
  ScalarJet j;
  j.f = constant;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double th = p[k][0] * x + p[k][1] * y;
    const double c = std::cos(th), s = std::sin(th);
    const double val = A[k] * c + B[k] * s;
    const double der = -A[k] * s + B[k] * c;
    j.f += val;
    j.grad[0] += p[k][0] * der;
    j.grad[1] += p[k][1] * der;
    j.lap -= (p[k][0] * p[k][0] + p[k][1] * p[k][1]) * val;
  }
  return j;
}

PlaneWaveSpinor random_torus_spinor(const GeometrySpec& g, int band, std::mt19937_64& rng) {
  if (g.kind != GeometryKind::FlatTorus2) throw Error(ErrorKind::Argument, "torus field on a non-torus geometry");
  PlaneWaveSpinor f;
  const double L1 = g.len(g.L1), L2 = g.len(g.L2);
  for (int a = -band; a <= band; ++a)
    for (int b = -band; b <= band; ++b) {
      f.p.push_back({2 * M_PI * (a + 0.5 * g.spin[0]) / L1, 2 * M_PI * (b + 0.5 * g.spin[1]) / L2});
      Vec2 c;
      for (int k = 0; k < 2; ++k) c(k) = cplx(normal(rng), normal(rng));
      f.c.push_back(c * std::exp(-0.3 * (a * a + b * b)));
    }
  return f;
}

PlaneWaveScalar random_torus_scalar(const GeometrySpec& g, int band, double amplitude, std::mt19937_64& rng) {
  if (g.kind != GeometryKind::FlatTorus2) throw Error(ErrorKind::Argument, "torus field on a non-torus geometry");
  PlaneWaveScalar f;
  const double L1 = g.len(g.L1), L2 = g.len(g.L2);
  for (int a = -band; a <= band; ++a)
    for (int b = -band; b <= band; ++b) {
      if (a == 0 && b == 0) continue;
      f.p.push_back({2 * M_PI * a / L1, 2 * M_PI * b / L2});
      f.A.push_back(amplitude * normal(rng));
      f.B.push_back(amplitude * normal(rng));
    }
  return f;
}

PlaneWaveSpinor random_plane_spinor(int waves, double scale, std::mt19937_64& rng) {
  PlaneWaveSpinor f;
  for (int k = 0; k < waves; ++k) {
    f.p.push_back({scale * normal(rng), scale * normal(rng)});
    Vec2 c;
    for (int i = 0; i < 2; ++i) c(i) = cplx(normal(rng), normal(rng));
    f.c.push_back(c);
  }
  return f;
}

PlaneWaveScalar random_plane_scalar(int waves, double scale, double amplitude, std::mt19937_64& rng) {
  PlaneWaveScalar f;
  for (int k = 0; k < waves; ++k) {
    f.p.push_back({scale * normal(rng), scale * normal(rng)});
    f.A.push_back(amplitude * normal(rng));
    f.B.push_back(amplitude * normal(rng));
  }
  return f;
}

std::vector<QuadPoint> torus_quadrature(const GeometrySpec& g, int perSide) {
  if (g.kind != GeometryKind::FlatTorus2) throw Error(ErrorKind::Argument, "torus quadrature on a non-torus geometry");
  if (perSide < 2) throw Error(ErrorKind::Parameter, "quadrature needs at least two points per side");
  const double L1 = g.len(g.L1), L2 = g.len(g.L2);
  const double w = L1 * L2 / (static_cast<double>(perSide) * perSide);
  std::vector<QuadPoint> q;
  q.reserve(static_cast<std::size_t>(perSide) * perSide);
  for (int i = 0; i < perSide; ++i)
    for (int j = 0; j < perSide; ++j) q.push_back({L1 * i / perSide, L2 * j / perSide, w});
  return q;
}

std::vector<QuadPoint> disk_quadrature(const GeometrySpec& g, int radial, int angular) {
  if (g.kind != GeometryKind::UnitDisk || g.n != 2) throw Error(ErrorKind::Argument, "disk quadrature needs the 2-disk");
  const double R = g.len(g.radius);
  const GaussRule gl = gauss_legendre(radial);
  std::vector<QuadPoint> q;
  q.reserve(static_cast<std::size_t>(radial) * angular);
  for (int i = 0; i < radial; ++i) {
    const double r = 0.5 * R * (gl.x[i] + 1.0);
    const double wr = 0.5 * R * gl.w[i] * r * 2 * M_PI / angular;
    for (int j = 0; j < angular; ++j) {
      const double t = 2 * M_PI * j / angular;
      q.push_back({r * std::cos(t), r * std::sin(t), wr});
    }
  }
  return q;
}

std::vector<BoundaryPoint> disk_boundary(const GeometrySpec& g, int angular) {
  if (g.kind != GeometryKind::UnitDisk || g.n != 2) throw Error(ErrorKind::Argument, "disk boundary needs the 2-disk");
  const double R = g.len(g.radius);
  std::vector<BoundaryPoint> q;
  q.reserve(angular);
  for (int j = 0; j < angular; ++j) {
    const double t = 2 * M_PI * j / angular;
    const double c = std::cos(t), s = std::sin(t);
    q.push_back({R * c, R * s, 2 * M_PI * R / angular, {c, s}, {-s, c}});
  }
  return q;
}

Vec2 cliff(const std::array<double, 2>& X, const Vec2& s) {
  // gamma_1 = i sigma_1, gamma_2 = i sigma_2
  Vec2 o;
  o(0) = I * (X[0] * s(1) - I * X[1] * s(1));
  o(1) = I * (X[0] * s(0) + I * X[1] * s(0));
  return o;
}

Vec2 dirac_of(const SpinorJet& j) { return cliff({1.0, 0.0}, j.d[0]) + cliff({0.0, 1.0}, j.d[1]); }

}  // namespace db
