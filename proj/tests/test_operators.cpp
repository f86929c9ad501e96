#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "diracbound/eigensolve.hpp"
#include "diracbound/errors.hpp"
#include "diracbound/operators.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace db;
using oracle::kPi;

namespace {

DiracBundleSpec disk() { return {make_disk(1.0), 0.0}; }

std::vector<cplx> sorted_eigs(const Eigen::MatrixXcd& A) {
  std::vector<cplx> ev = general_eigenvalues(A);
  std::sort(ev.begin(), ev.end(), eigen_order);
  return ev;
}

std::vector<double> hermitian_values(const OperatorMatrix& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.entries);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

OperatorMatrix mode_op(double m, const BoundaryCondition& bc, int res) {
  const OperatorMatrix op = assemble_dirac(disk(), res, m);
  return apply_bc(op, bc, std::nullopt, disk(), res);
}

// Local-condition disk roots for label m: J_{l+1}(x) + sign J_l(x), l = m - 1/2.
std::vector<double> local_roots(double m, int sign, double radius) {
  const int l = static_cast<int>(std::lround(m - 0.5));
  std::vector<double> roots = oracle::real_roots(
      [&](double x) { return oracle::bessel_jr(l + 1, x) + sign * oracle::bessel_jr(l, x); }, -radius, radius);
  // x = 0 is a common zero of both Bessel functions for l != 0, -1 and carries no eigenfunction
  std::erase_if(roots, [](double x) { return std::abs(x) < 1e-8; });
  return roots;
}

template <class F>
void check_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

Mat2 nu_matrix(double theta) {
  const CliffordRep rep = build_clifford(2);
  return clifford_matrix(rep, {std::cos(theta), std::sin(theta)});
}

}  // namespace

TEST_CASE("torus Dirac spectrum matches the Fourier brute force") {
  struct Case {
    double L1, L2;
    int d1, d2;
  };
  for (const Case c : {Case{1, 1, 0, 0}, Case{1, 1, 1, 1}, Case{1, 1, 1, 0}, Case{2, 0.7, 0, 1}}) {
    const DiracBundleSpec b{make_torus(c.L1, c.L2, {c.d1, c.d2}), 0.0};
    const OperatorMatrix op = assemble_dirac(b, 16);
    CHECK(op.layout == Layout::Fourier);
    CHECK(check_symmetry(op));
    std::vector<double> got = hermitian_values(op);
    for (double& x : got) x = std::abs(x);
    std::sort(got.begin(), got.end());
    const std::vector<double> expect = oracle::torus_moduli(c.L1, c.L2, c.d1, c.d2);
    // each Fourier mode contributes +-|p|; compare the lowest 20 moduli pairwise
    for (int i = 0; i < 20; ++i) CHECK(got[i] == doctest::Approx(expect[i / 2]).epsilon(1e-12).scale(1.0));
  }
  const DiracBundleSpec trivial{make_torus(1, 1), 0.0};
  double kernel = 1e300;
  for (double x : hermitian_values(assemble_dirac(trivial, 8))) kernel = std::min(kernel, std::abs(x));
  CHECK(kernel < 1e-12);
  std::vector<double> v = hermitian_values(assemble_dirac(DiracBundleSpec{make_torus(1, 1, {1, 1}), 0.0}, 8));
  double smallest = 1e300;
  for (double x : v) smallest = std::min(smallest, std::abs(x));
  CHECK(smallest == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(smallest == doctest::Approx(4.442882938).epsilon(1e-9));
}

TEST_CASE("no fermion doublers on the torus") {
  const DiracBundleSpec b{make_torus(1, 1, {1, 0}), 0.0};
  const int res = 16;
  const double cut = res * kPi / 2.0;
  const std::vector<double> got = hermitian_values(assemble_dirac(b, res));
  const std::vector<double> exact = oracle::torus_moduli(1, 1, 1, 0, 40);
  const auto inside = std::count_if(got.begin(), got.end(), [&](double x) { return std::abs(x) <= cut; });
  const auto expect = 2 * std::count_if(exact.begin(), exact.end(), [&](double x) { return x <= cut; });
  CHECK(inside == expect);
}

TEST_CASE("torus connection Laplacian and the Bochner formula") {
  const DiracBundleSpec b{make_torus(1, 1, {1, 1}), 0.0};
  const OperatorMatrix L = assemble_connection_laplacian(b, 12);
  std::vector<double> ev = hermitian_values(L);
  const std::vector<double> exact = oracle::torus_moduli(1, 1, 1, 1);
  for (int i = 0; i < 16; ++i) CHECK(ev[i] == doctest::Approx(exact[i / 2] * exact[i / 2]).epsilon(1e-12));
  const OperatorMatrix L0 = assemble_connection_laplacian(DiracBundleSpec{make_torus(1, 1), 0.0}, 8);
  CHECK(std::abs(hermitian_values(L0)[0]) < 1e-12);
  for (double B : {0.0, 2.0 * kPi, -4.0 * kPi}) {
    const DiracBundleSpec tb{make_torus(1, 1), B};
    const OperatorMatrix D = assemble_dirac(tb, 12), Lb = assemble_connection_laplacian(tb, 12),
                         R = assemble_curvature(tb, 12);
    const Eigen::MatrixXcd defect = D.entries * D.entries - Lb.entries - R.entries;
    const double scale = (D.entries * D.entries).cwiseAbs().maxCoeff();
    CHECK(defect.cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("Landau levels of the twisted torus") {
  // B = 2 pi k on the unit torus: |lambda|^2 = 2 |B| j with |flux| zero modes
  for (int flux : {1, 2, -1}) {
    const double B = 2.0 * kPi * flux;
    const std::vector<double> ev = hermitian_values(assemble_dirac(DiracBundleSpec{make_torus(1, 1), B}, 10));
    std::vector<double> mod;
    for (double x : ev) mod.push_back(std::abs(x));
    std::sort(mod.begin(), mod.end());
    const int zeros = std::abs(flux);
    for (int i = 0; i < zeros; ++i) CHECK(mod[i] < 1e-12);
    for (int i = zeros; i < 3 * zeros; ++i) CHECK(mod[i] == doctest::Approx(std::sqrt(2.0 * std::abs(B))).epsilon(1e-12));
  }
}

TEST_CASE("assembly errors") {
  check_error(ErrorKind::Resolution, [] { assemble_dirac(disk(), 4, 0.5); });
  check_error(ErrorKind::Resolution, [] { assemble_dirac(DiracBundleSpec{make_torus(1, 1), 0.0}, 200); });
  check_error(ErrorKind::Argument, [] { assemble_dirac(disk(), 64); });
  check_error(ErrorKind::NoBoundary, [] { boundary_dirac(DiracBundleSpec{make_sphere(2, 1), 0.0}, 64); });
  check_error(ErrorKind::Argument, [] {
    apply_bc(assemble_dirac(disk(), 64, 0.5), BoundaryCondition::aps(0.0), std::nullopt, disk(), 64);
  });
}

TEST_CASE("disk local condition matches Bessel roots for every mode") {
  for (int sign : {1, -1}) {
    for (double m : {0.5, -0.5, 1.5, -1.5, 2.5, -3.5}) {
      const OperatorMatrix op = mode_op(m, BoundaryCondition::local(sign), 256);
      CHECK(check_symmetry(op));
      std::vector<double> got = hermitian_values(op);
      std::vector<double> roots = local_roots(m, sign, 9.0);
      std::vector<double> small;
      for (double x : got)
        if (std::abs(x) < 9.0) small.push_back(x);
      REQUIRE(small.size() == roots.size());
      for (std::size_t i = 0; i < roots.size(); ++i)
        CHECK(std::abs(small[i] - roots[i]) < 1e-5 * roots[i] * roots[i]);
    }
  }
}

TEST_CASE("staggered eigenvalues converge at second order") {
  for (double m : {0.5, -1.5}) {
    const double root = local_roots(m, 1, 3.0).front();
    std::vector<double> hs, errs;
    for (int res : {64, 128, 256}) {
      const std::vector<double> got = hermitian_values(mode_op(m, BoundaryCondition::local(1), res));
      double best = 1e300;
      for (double x : got) best = std::min(best, std::abs(x - root));
      hs.push_back(1.0 / res);
      errs.push_back(best);
    }
    CHECK(oracle::slope(hs, errs) >= 1.9);
  }
}

TEST_CASE("MIT condition: Bessel roots and non-real spectrum") {
  struct Case {
    int sign;
    double m;
  };
  for (const Case c : {Case{1, 0.5}, Case{1, -1.5}, Case{-1, -0.5}}) {
    {
      const int sign = c.sign;
      const double m = c.m;
      const OperatorMatrix op = mode_op(m, BoundaryCondition::mit(sign), 256);
      const std::vector<cplx> ev = sorted_eigs(op.entries);
      // resolved part of the spectrum; the top grid modes are discretization artifacts
      for (const cplx z : ev)
        if (std::abs(z) < 0.1 * 256) CHECK(std::abs(z.imag()) > 1e-6);
      const int l = static_cast<int>(std::lround(m - 0.5));
      auto f = [&](cplx z) { return oracle::bessel_j(l + 1, z) - cplx(0.0, sign) * oracle::bessel_j(l, z); };
      for (int i = 0; i < 4; ++i) {
        const cplx root = oracle::newton(f, ev[i]);
        CHECK(std::abs(f(root)) < 1e-10);
        CHECK(std::abs(root - ev[i]) < 2e-5 * std::norm(root));
      }
    }
  }
}

TEST_CASE("self-adjoint conditions give real spectra") {
  const OperatorMatrix bd = boundary_dirac(disk(), 64);
  for (double m : {0.5, -0.5, 1.5, -2.5}) {
    for (const BoundaryCondition bc : {BoundaryCondition::local(1), BoundaryCondition::local(-1),
                                       BoundaryCondition::aps(0.0), BoundaryCondition::aps(-1.0),
                                       BoundaryCondition::maps(0.0, 1), BoundaryCondition::maps(-1.0, -1)}) {
      const OperatorMatrix op = apply_bc(assemble_dirac(disk(), 64, m), bc, bd, disk(), 64);
      if (op.size() == 0) continue;
      const std::vector<cplx> ev = sorted_eigs(op.entries);
      double maxAbs = 0.0, maxIm = 0.0;
      for (const cplx z : ev) {
        maxAbs = std::max(maxAbs, std::abs(z));
        maxIm = std::max(maxIm, std::abs(z.imag()));
      }
      CHECK(maxIm <= 1e-8 * maxAbs);
    }
  }
}

TEST_CASE("boundary Dirac operator of the unit disk") {
  const OperatorMatrix bd = boundary_dirac(disk(), 64);
  CHECK(check_symmetry(bd));
  const std::vector<double> ev = hermitian_values(bd);
  std::multiset<long> halves;
  for (double x : ev) {
    const double k = x - 0.5;
    CHECK(std::abs(k - std::round(k)) < 1e-10);
    halves.insert(std::lround(2.0 * x));
  }
  for (long v : {1L, -1L, 3L, -3L, 5L}) CHECK(halves.count(v) >= 1);
  // constant Cartesian spinor: D-bar s0 = (H/2) s0
  Eigen::VectorXcd s0(bd.size());
  for (Eigen::Index j = 0; j < bd.size(); ++j) s0[j] = j % 2 ? cplx(0.3, -0.2) : cplx(1.0, 0.5);
  CHECK((bd.applyNodal(s0) - 0.5 * s0).norm() <= 1e-10 * s0.norm());
}

TEST_CASE("boundary Dirac operator anticommutes with the normal") {
  const int N = 64;
  const OperatorMatrix bd = boundary_dirac(disk(), N);
  Eigen::MatrixXcd Nu = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
  for (int j = 0; j < N; ++j) Nu.block(2 * j, 2 * j, 2, 2) = nu_matrix(2.0 * kPi * j / N);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * N);
  for (int k = -5; k <= 5; ++k) {
    const cplx a(nd(rng), nd(rng)), c(nd(rng), nd(rng));
    for (int j = 0; j < N; ++j) {
      const cplx e = std::exp(cplx(0.0, 2.0 * kPi * k * j / N));
      v[2 * j] += a * e;
      v[2 * j + 1] += c * e;
    }
  }
  const Eigen::VectorXcd ac = bd.applyNodal(Nu * v) + Nu * bd.applyNodal(v);
  CHECK(ac.norm() <= 1e-10 * v.norm());
}

TEST_CASE("cylinder boundary spectra carry the spin-structure offset") {
  for (int spin : {0, 1}) {
    const double C = 2.0;
    const DiracBundleSpec b{make_cylinder(1.0, C, spin), 0.0};
    const std::vector<double> ev = hermitian_values(boundary_dirac(b, 32));
    for (double x : ev) {
      const double k = x * C / (2.0 * kPi) - 0.5 * spin;
      CHECK(std::abs(k - std::round(k)) < 1e-10);
    }
  }
}

TEST_CASE("integration by parts") {
  SUBCASE("torus is exactly skew-adjoint") {
    const DiracBundleSpec b{make_torus(1, 1, {1, 0}), 0.0};
    const OperatorMatrix op = assemble_dirac(b, 12);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 10; ++t) {
      SpinorField s1, s2;
      s1.layout = s2.layout = Layout::Fourier;
      s1.values = Eigen::VectorXcd::Zero(op.size());
      s2.values = Eigen::VectorXcd::Zero(op.size());
      for (Eigen::Index k = 0; k < op.size(); ++k) {
        s1.values[k] = cplx(nd(rng), nd(rng));
        s2.values[k] = cplx(nd(rng), nd(rng));
      }
      const double scale = op.entries.cwiseAbs().maxCoeff() * s1.values.norm() * s2.values.norm();
      CHECK(ibp_residual(op, b, s1, s2) <= 1e-12 * scale);
      CHECK(ibp_residual(op, b, s1, s1) <= 1e-12 * scale);
    }
  }
  SUBCASE("disk residual converges under refinement") {
    for (double m : {0.5, -1.5}) {
      const double l = m - 0.5;
      // regular at the centre: f1 ~ r^|l|-type, f2 one power higher (or lower for negative labels)
      auto f1 = [l](double r) { return cplx(std::pow(r, std::abs(l)) * (1.0 + 0.3 * r * r), 0.2 * r * r); };
      auto f2 = [l](double r) { return cplx(std::pow(r, std::abs(l + 1)) * std::cos(r), 0.1 * std::pow(r, 3)); };
      auto g1 = [l](double r) { return cplx(std::pow(r, std::abs(l)) * std::exp(-r), 0.0); };
      auto g2 = [l](double r) { return cplx(0.5 * std::pow(r, std::abs(l + 1)), std::pow(r, std::abs(l + 1)) * r); };
      std::vector<double> hs, res;
      for (int N : {64, 128, 256, 512}) {
        const OperatorMatrix op = assemble_dirac(disk(), N, m);
        const SpinorField s1 = sample_mode_field(op, f1, f2, 0.0, 1.0);
        const SpinorField s2 = sample_mode_field(op, g1, g2, 0.0, 1.0);
        hs.push_back(1.0 / N);
        res.push_back(ibp_residual(op, disk(), s1, s2));
      }
      // the staggered scheme satisfies a discrete summation by parts, so the residual is
      // either at rounding level or decays with order at least one
      const bool exact = *std::max_element(res.begin(), res.end()) < 1e-12;
      CHECK((exact || oracle::slope(hs, res) >= 1.0));
    }
  }
  SUBCASE("grid mismatch") {
    const OperatorMatrix op = assemble_dirac(disk(), 64, 0.5);
    SpinorField s;
    s.values = Eigen::VectorXcd::Zero(3);
    check_error(ErrorKind::Shape, [&] { ibp_residual(op, disk(), s, s); });
  }
}

TEST_CASE("per-mode Laplacian is Hermitian and consistent with the Dirac square") {
  for (double m : {0.5, -1.5}) {
    const OperatorMatrix L = assemble_connection_laplacian(disk(), 64, m);
    CHECK(check_symmetry(L));
    const std::vector<double> ev = hermitian_values(L);
    CHECK(ev.front() > -1e-10);
  }
}

TEST_CASE("triplet export") {
  const OperatorMatrix op = assemble_dirac(DiracBundleSpec{make_torus(1, 1), 0.0}, 8);
  std::istringstream in(export_triplets(op, 1e-14));
  long rows = 0;
  long i, j;
  double re, im;
  while (in >> i >> j >> re >> im) {
    CHECK(std::abs(op.entries(i, j) - cplx(re, im)) < 1e-15);
    ++rows;
  }
  CHECK(rows == (op.entries.array().abs() > 1e-14).count());
}
