#include <cmath>
#include <random>
#include <string>

#include "diracbound/bounds.hpp"
#include "diracbound/errors.hpp"
#include "diracbound/identity_lab.hpp"
#include "diracbound/spectrum.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace db;
using oracle::kPi;

namespace {

template <class F>
void check_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

DiracBundleSpec torus() { return {make_torus(1.0, 1.0, {1, 0}), 0.0}; }
DiracBundleSpec disk() { return {make_disk(1.0), 0.0}; }

// Parseval on the torus: int |D s|^2 = int |grad s|^2 = Vol * sum |p|^2 |c|^2 for distinct momenta.
double parseval_energy(const PlaneWaveSpinor& s, double vol) {
  double e = 0.0;
  for (std::size_t k = 0; k < s.p.size(); ++k)
    e += (s.p[k][0] * s.p[k][0] + s.p[k][1] * s.p[k][1]) * s.c[k].squaredNorm();
  return vol * e;
}

WeightParams random_weight(const GeometrySpec& g, std::mt19937_64& rng, bool periodic) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WeightParams w;
  w.phi = periodic ? random_torus_scalar(g, 2, 0.5, rng) : random_plane_scalar(3, 1.5, 0.5, rng);
  w.tau = u(rng);
  w.delta = u(rng);
  w.r = 1.0;
  return w;
}

}  // namespace

TEST_CASE("fitted order") {
  std::vector<std::pair<double, double>> s;
  for (double h : {0.1, 0.05, 0.025}) s.push_back({h, 3.0 * h * h});
  REQUIRE(fitted_order(s));
  CHECK(*fitted_order(s) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(fitted_order({{0.1, 1e-20}, {0.05, 1e-20}}, 1e-16));
}

TEST_CASE("Bochner formula") {
  for (double B : {0.0, 2.0 * kPi, 4.0 * kPi}) {
    const IdentityReport r = check_bochner(DiracBundleSpec{make_torus(1, 1), B}, 12);
    CHECK(r.residual <= 1e-12 * r.scale);
  }
  const IdentityReport d = check_bochner(disk(), 64, true);
  REQUIRE(d.order);
  CHECK(*d.order >= 1.0);
  const IdentityReport s = check_bochner(DiracBundleSpec{make_sphere(2, 1.0), 0.0}, 64, true);
  REQUIRE(s.resolutionSeries.size() >= 3);
  for (std::size_t i = 1; i < s.resolutionSeries.size(); ++i)
    CHECK(s.resolutionSeries[i].second < s.resolutionSeries[i - 1].second);
}

TEST_CASE("unweighted identity on the torus against Parseval") {
  std::mt19937_64 rng(21);
  const GeometrySpec g = torus().geometry;
  for (int t = 0; t < 20; ++t) {
    const PlaneWaveSpinor s = random_torus_spinor(g, 3, rng);
    WeightParams w;  // phi = 0
    const IdentityReport r = check_weighted_identity(torus(), s, w, twistor_params(1.0, 0.0, 2), "unw", 16);
    CHECK(r.residual <= 1e-10 * r.scale);
    CHECK(r.lhs == doctest::Approx(parseval_energy(s, 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("weighted identities on the torus") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const GeometrySpec g = torus().geometry;
  for (int t = 0; t < 10; ++t) {
    const PlaneWaveSpinor s = random_torus_spinor(g, 3, rng);
    const WeightParams w = random_weight(g, rng, true);
    const TwistorParams tp = twistor_params(u(rng), 0.3 * u(rng), 2);
    for (const char* v : {"unw", "PP2", "est1", "est11", "est2"}) {
      const IdentityReport r = check_weighted_identity(torus(), s, w, tp, v, 16);
      CHECK_MESSAGE(r.residual <= 1e-10 * r.scale, std::string(v));
    }
  }
}

TEST_CASE("weighted identities on the disk with boundary terms") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 5; ++t) {
    const PlaneWaveSpinor s = random_plane_spinor(3, 1.5, rng);
    const WeightParams w = random_weight(disk().geometry, rng, false);
    const TwistorParams tp = twistor_params(1.2, 0.4, 2);
    for (const char* v : {"unw", "PP2", "est1", "est11", "est2"}) {
      const IdentityReport r = check_weighted_identity(disk(), s, w, tp, v, 128);
      CHECK_MESSAGE(r.residual <= 1e-10 * r.scale, std::string(v));
    }
  }
}

TEST_CASE("parameter errors") {
  std::mt19937_64 rng(24);
  const PlaneWaveSpinor s = random_torus_spinor(torus().geometry, 2, rng);
  WeightParams w;
  // xi = 0 at eta = (1, 0)
  check_error(ErrorKind::Parameter,
              [&] { check_weighted_identity(torus(), s, w, twistor_params(1.0, 0.0, 2), "est1", 16); });
  w.r = 0.0;
  check_error(ErrorKind::Parameter,
              [&] { check_weighted_identity(torus(), s, w, twistor_params(1.0, 0.5, 2), "est2", 16); });
  TwistorParams bad = twistor_params(0.0, 1.0, 2);
  check_error(ErrorKind::Parameter, [&] { check_weighted_identity(torus(), s, WeightParams{}, bad, "unw", 16); });
}

TEST_CASE("est2 is the limit of est1") {
  std::mt19937_64 rng(25);
  const PlaneWaveSpinor s = random_torus_spinor(torus().geometry, 2, rng);
  WeightParams w = random_weight(torus().geometry, rng, true);
  w.r = 0.5;
  const IdentityReport r = check_est2_limit(torus(), s, w, 16);
  REQUIRE(r.order);
  CHECK(*r.order == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("boundary identities on the disk") {
  std::mt19937_64 rng(26);
  const PlaneWaveSpinor s = random_plane_spinor(3, 1.5, rng);
  const PlaneWaveScalar phi = random_plane_scalar(3, 1.5, 0.5, rng);
  for (const BoundaryCondition bc : {BoundaryCondition::mit(1), BoundaryCondition::mit(-1),
                                     BoundaryCondition::local(1), BoundaryCondition::local(-1)}) {
    const IdentityReport b1 = boundary_identity_series(disk(), bc, s, phi, 0.3, -0.2, "b1");
    CHECK((!b1.order || *b1.order >= 1.0));
    CHECK(b1.resolutionSeries.back().second < 1e-3 * b1.scale);
    const IdentityReport b2 = check_boundary_identity(disk(), bc, s, phi, 0.3, -0.2, "b2", 128);
    CHECK(b2.residual <= 1e-10 * b2.scale);
  }
  for (const char* v : {"DD", "D"}) {
    const IdentityReport r = boundary_identity_series(disk(), BoundaryCondition::none(), s, phi, 0.3, -0.2, v);
    CHECK((!r.order || *r.order >= 1.0));
  }
  // b = 1/2 and 3/2 sit on eigenvalues of the boundary operator
  for (double b : {-1.0, -0.25, 0.0, 0.5, 1.5}) {
    for (int sign : {1, -1}) {
      for (int i = 0; i < 20; ++i) {
        const IdentityReport r =
            check_boundary_identity(disk(), BoundaryCondition::maps(b, sign), s, phi, 0.0, 0.0, "maps", 128, &rng);
        CHECK(r.residual <= 1e-10 * r.scale);
        if (b <= 0.0) CHECK(std::abs(r.lhs) <= 1e-10 * r.scale);
        else CHECK(r.lhs <= b + 1e-10);
      }
    }
  }
}

TEST_CASE("curvature relation of Killing spinors") {
  SUBCASE("torus parallel spinor") {
    const DiracBundleSpec b{make_torus(1, 1), 0.0};
    const OperatorMatrix op = assemble_dirac(b, 8);
    const EigenResult e = hermitian_eigs(op, 1, 1e-12, true);
    const IdentityReport r = check_ri(b, op, e, 0.0);
    CHECK(r.residual <= 1e-12);
    CHECK(std::abs(r.lhs) <= 1e-12);
  }
  SUBCASE("unit sphere ground mode") {
    const DiracBundleSpec b{make_sphere(2, 1.0), 0.0};
    SpectrumOptions so;
    so.k = 1;
    so.resolution = 256;
    so.modes = 1;
    so.wantGround = true;
    const SpectrumResult sr = compute_spectrum(b, so);
    REQUIRE(sr.ground);
    const cplx lam = sr.ground->eigenvalues.front();
    const IdentityReport r = check_ri(b, *sr.groundOp, *sr.ground, 0.5);
    CHECK(r.rhs == doctest::Approx(0.5));
    CHECK(r.residual <= 1e-10);
    // a = -lambda / n from the solver against the least-squares fit of grad s = a X.s
    const double fitted = fitted_killing_constant(b, *sr.groundOp, sr.ground->vectors.front());
    CHECK(std::abs(std::abs(fitted) - std::abs(lam.real()) / 2.0) <= 1e-4);
  }
}

TEST_CASE("homothety of spectra") {
  const IdentityReport one = check_scaling(DiracBundleSpec{make_torus(1, 1, {1, 1}), 0.0}, BoundaryCondition::none(),
                                           1.0, 4, 8);
  CHECK(one.residual == 0.0);
  const IdentityReport t = check_scaling(DiracBundleSpec{make_torus(1, 1, {1, 1}), 0.0}, BoundaryCondition::none(),
                                         2.0, 4, 8);
  CHECK(t.residual <= 1e-12);
  SpectrumOptions so;
  so.k = 1;
  so.resolution = 8;
  const SpectrumResult half = compute_spectrum(rescale(DiracBundleSpec{make_torus(1, 1, {1, 1}), 0.0}, 2.0), so);
  CHECK(std::abs(half.values[0].value) == doctest::Approx(kPi * std::sqrt(2.0) / 2.0).epsilon(1e-12));
  const IdentityReport d = check_scaling(disk(), BoundaryCondition::local(1), 3.0, 4, 128);
  CHECK(d.residual <= 1e-8);
}
