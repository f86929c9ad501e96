#include <cmath>

#include "diracbound/errors.hpp"
#include "diracbound/geometry.hpp"
#include "doctest.h"

using namespace db;

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_error(ErrorKind kind, const std::function<void()>& f) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

std::vector<GeometrySpec> catalog() {
  return {make_torus(1.0, 1.0),        make_torus(2.0, 0.7, {1, 0}), make_sphere(2, 1.0),
          make_sphere(3, 1.5),         make_disk(1.0),               make_disk(0.8, 3),
          make_annulus(0.5, 1.0),      make_annulus(0.2, 2.0),       make_cylinder(1.0, 2.0, 1),
          make_cylinder(2.0, 1.0, 0, 3)};
}
}  // namespace

TEST_CASE("closed-form invariants of the catalog") {
  const auto disk = invariants(make_disk(1.0));
  CHECK(disk.volume == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(disk.boundaryArea == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(disk.scalarCurvature == 0.0);
  CHECK(disk.hasBoundary);
  CHECK(disk.meanCurvatureMaxAbs() == doctest::Approx(1.0));

  const auto s2 = invariants(make_sphere(2, 1.0));
  CHECK(s2.volume == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  CHECK(s2.scalarCurvature == doctest::Approx(2.0));
  CHECK_FALSE(s2.hasBoundary);
  CHECK(s2.boundaryArea == 0.0);

  const auto s3 = invariants(make_sphere(3, 1.0));
  CHECK(s3.volume == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-15));
  CHECK(s3.scalarCurvature == doctest::Approx(6.0));

  const auto t = invariants(make_torus(1.0, 1.0, {1, 1}));
  CHECK(t.volume == doctest::Approx(1.0));
  CHECK(t.scalarCurvature == 0.0);
  CHECK_FALSE(t.hasBoundary);

  const auto ball = invariants(make_disk(1.0, 3));
  CHECK(ball.volume == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(ball.boundaryArea == doctest::Approx(4.0 * kPi).epsilon(1e-15));

  const auto ann = invariants(make_annulus(0.5, 1.0));
  CHECK(ann.volume == doctest::Approx(kPi * 0.75).epsilon(1e-15));
  CHECK(ann.boundaryArea == doctest::Approx(3.0 * kPi).epsilon(1e-15));
  CHECK(ann.boundary.size() == 2);
  // inner circle is concave w.r.t. the outward normal
  CHECK(ann.meanCurvatureMaxAbs() == doctest::Approx(2.0));

  const auto cyl = invariants(make_cylinder(1.0, 2.0));
  CHECK(cyl.volume == doctest::Approx(2.0));
  CHECK(cyl.boundaryArea == doctest::Approx(4.0));
  CHECK(cyl.meanCurvatureMaxAbs() == 0.0);
}

TEST_CASE("boundary area vanishes exactly when there is no boundary") {
  for (const auto& g : catalog()) {
    const auto inv = invariants(g);
    CHECK(inv.volume > 0.0);
    CHECK((inv.boundaryArea == 0.0) == !inv.hasBoundary);
  }
}

TEST_CASE("invalid parameters") {
  check_error(ErrorKind::Parameter, [] { make_disk(-1.0); });
  check_error(ErrorKind::Parameter, [] { make_torus(0.0, 1.0); });
  check_error(ErrorKind::Parameter, [] { make_annulus(1.0, 0.5); });
  check_error(ErrorKind::Parameter, [] { make_sphere(2, 0.0); });
  check_error(ErrorKind::Parameter, [] { make_geometry(GeometryKind::UnitDisk, {{"radius", -2.0}}); });
  check_error(ErrorKind::Parameter, [] { make_geometry(GeometryKind::UnitDisk, {{"colour", 1.0}}); });
  check_error(ErrorKind::Parameter, [] { rescale(make_disk(1.0), 0.0); });
  check_error(ErrorKind::Parameter, [] { rescale(make_disk(1.0), -2.0); });
}

TEST_CASE("generic constructor matches the named constructors") {
  const auto a = invariants(make_geometry(GeometryKind::Annulus, {{"rho_in", 0.3}, {"rho_out", 1.2}}));
  const auto b = invariants(make_annulus(0.3, 1.2));
  CHECK(a.volume == doctest::Approx(b.volume).epsilon(1e-15));
  CHECK(a.boundaryArea == doctest::Approx(b.boundaryArea).epsilon(1e-15));
}

TEST_CASE("homothety") {
  SUBCASE("unit disk scaled by 2") {
    const auto inv = invariants(rescale(make_disk(1.0), 2.0));
    CHECK(inv.volume == doctest::Approx(4.0 * kPi).epsilon(1e-15));
    CHECK(inv.meanCurvatureMaxAbs() == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("sphere scaled by 3 equals the sphere of radius 3") {
    const auto a = invariants(rescale(make_sphere(2, 1.0), 3.0));
    const auto b = invariants(make_sphere(2, 3.0));
    CHECK(a.scalarCurvature == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
    CHECK(a.scalarCurvature == doctest::Approx(b.scalarCurvature).epsilon(1e-15));
    CHECK(a.volume == doctest::Approx(b.volume).epsilon(1e-15));
  }
  SUBCASE("sigma = 1 is the identity") {
    for (const auto& g : catalog()) {
      const auto a = invariants(g), b = invariants(rescale(g, 1.0));
      CHECK(a.volume == b.volume);
      CHECK(a.scalarCurvature == b.scalarCurvature);
    }
  }
  SUBCASE("scaling laws and round trip") {
    for (const auto& g : catalog()) {
      for (double s : {0.3, 2.0, 7.5}) {
        const auto a = invariants(g), b = invariants(rescale(g, s));
        CHECK(b.volume == doctest::Approx(std::pow(s, g.n) * a.volume).epsilon(1e-14));
        CHECK(b.boundaryArea == doctest::Approx(std::pow(s, g.n - 1) * a.boundaryArea).epsilon(1e-14));
        CHECK(b.scalarCurvature == doctest::Approx(a.scalarCurvature / (s * s)).epsilon(1e-14));
        CHECK(b.meanCurvatureMaxAbs() == doctest::Approx(a.meanCurvatureMaxAbs() / s).epsilon(1e-14));
        const auto c = invariants(rescale(rescale(g, s), 1.0 / s));
        CHECK(c.volume == doctest::Approx(a.volume).epsilon(1e-14));
        CHECK(c.boundaryArea == doctest::Approx(a.boundaryArea).epsilon(1e-14));
        CHECK(c.scalarCurvature == doctest::Approx(a.scalarCurvature).epsilon(1e-14));
        CHECK(c.meanCurvatureMaxAbs() == doctest::Approx(a.meanCurvatureMaxAbs()).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("quadrature volume matches the closed form") {
  for (const auto& g : catalog()) {
    const double exact = invariants(g).volume;
    CHECK(volume_quadrature(g, 64) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const GaussRule r = gauss_legendre(8);
  for (int p = 0; p <= 15; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], p);
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("bundle validation") {
  CHECK(torus_flux(DiracBundleSpec{make_torus(1.0, 1.0), 4.0 * kPi}) == 2);
  check_error(ErrorKind::Parameter, [] { validate(DiracBundleSpec{make_torus(1.0, 1.0), 1.0}); });
  check_error(ErrorKind::Capability, [] { validate(DiracBundleSpec{make_sphere(2, 1.0), 1.0}); });
  // the field scales as sigma^-2 and the flux is invariant
  const DiracBundleSpec b = rescale(DiracBundleSpec{make_torus(1.0, 1.0), 2.0 * kPi}, 2.0);
  CHECK(b.field() == doctest::Approx(2.0 * kPi / 4.0));
  CHECK(torus_flux(b) == 1);
}
