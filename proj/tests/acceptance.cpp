// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "diracbound/bounds.hpp"
#include "diracbound/experiments.hpp"
#include "diracbound/fields.hpp"
#include "diracbound/identity_lab.hpp"
#include "diracbound/operators.hpp"
#include "diracbound/spectrum.hpp"
#include "oracles.hpp"

using namespace db;
using oracle::cplx;
using oracle::kPi;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  o.detail.precision(6);
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s: %s;%s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), o.detail.str().c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

const DiracBundleSpec kDisk{make_disk(1.0), 0.0};

SpectrumResult spectrum(const DiracBundleSpec& b, const BoundaryCondition& bc, int k, int res, int modes = 4,
                        bool ground = false) {
  SpectrumOptions so;
  so.bc = bc;
  so.k = k;
  so.resolution = res;
  so.modes = modes;
  so.wantGround = ground;
  return compute_spectrum(b, so);
}

// Smallest nonzero |x| with J_{l+1}(x) + J_l(x) = 0 over labels l = m - 1/2: local condition, sign +1.
double local_disk_oracle() {
  double best = 1e300;
  for (int l = -4; l <= 3; ++l) {
    const auto roots = oracle::real_roots(
        [l](double x) { return oracle::bessel_jr(l + 1, x) + oracle::bessel_jr(l, x); }, -6.0, 6.0);
    for (double x : roots)
      if (std::abs(x) > 1e-8) best = std::min(best, std::abs(x));
  }
  return best;
}

}  // namespace

int main() {
  const auto start = Clock::now();

  criterion(1, "weighted identities on the torus, 100 random instances", [](Outcome& o) {
    const auto t0 = Clock::now();
    SuiteOptions so;
    so.suite = "identities";
    so.seed = 1;
    so.instances = 100;
    const std::vector<CheckResult> checks = run_suite(so);
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    int counted = 0;
    for (const auto& c : checks) {
      const std::string& id = c.report.identity;
      for (const char* v : {"unw/", "PP2/", "est1/", "est11/", "est2/"})
        if (id.rfind(v, 0) == 0) {
          ++counted;
          worst = std::max(worst, c.report.residual / c.report.scale);
          o.require(c.report.residual <= 1e-10 * c.report.scale, id);
        }
    }
    o.require(counted == 5, "five identity variants");
    o.require(elapsed <= 60.0, "runtime <= 60 s");
    o.detail << " worst residual/scale " << worst << " <= 1e-10, runtime " << elapsed << " s";
  });

  criterion(2, "Bochner formula on the torus", [](Outcome& o) {
    double worst = 0.0;
    for (double B : {0.0, 2.0 * kPi, 4.0 * kPi}) {
      const IdentityReport r = check_bochner(DiracBundleSpec{make_torus(1.0, 1.0), B}, 16);
      worst = std::max(worst, r.residual);
    }
    o.require(worst <= 1e-12, "max entry <= 1e-12");
    o.detail << " max |D^2 - (nabla*nabla + R)| = " << worst << " for B in {0, 2pi, 4pi}";
  });

  criterion(3, "T1 equality on the unit 2-sphere", [](Outcome& o) {
    const DiracBundleSpec s2{make_sphere(2, 1.0), 0.0};
    const SpectrumResult sr = spectrum(s2, BoundaryCondition::none(), 1, 512, 1, true);
    const double lam2 = std::norm(sr.values.front().value);
    const double rhs = bound_t1(s2);
    const EqualityDiagnostics d = equality_diagnostics(s2, *sr.groundOp, *sr.ground);
    o.require(std::abs(lam2 - 1.0) <= 1e-3, "lambda^2 in [1 - 1e-3, 1 + 1e-3]");
    o.require(rhs == 1.0, "rhs = 1");
    o.require(d.killingResidual && *d.killingResidual <= 1e-4, "killing residual <= 1e-4");
    o.detail << " lambda^2 = " << lam2 << " (exact 1), rhs = " << rhs
             << ", killing residual = " << (d.killingResidual ? *d.killingResidual : NAN);
  });

  criterion(4, "T1 strict inequality on the unit disk, local condition", [](Outcome& o) {
    const SpectrumResult sr = spectrum(kDisk, BoundaryCondition::local(1), 1, 512);
    const double lam = std::abs(sr.values.front().value);
    const double ref = local_disk_oracle();
    const double rhs = bound_t1(kDisk);
    o.require(rhs == 2.0, "rhs = 2");
    o.require(lam * lam >= 2.0 && lam * lam - rhs > 0.02, "gap > 0.02");
    o.require(std::abs(lam - ref) <= 1e-4 * ref, "agrees with the Bessel root");
    o.detail << " lambda^2 = " << lam * lam << " (Bessel oracle " << ref * ref << "), rhs = " << rhs
             << ", gap = " << lam * lam - rhs;
  });

  criterion(5, "MIT eigenvalues are non-real, self-adjoint conditions give real spectra", [](Outcome& o) {
    const SpectrumResult mit = spectrum(kDisk, BoundaryCondition::mit(1), 10, 256);
    o.require(mit.values.size() == 10, "ten MIT roots");
    double minIm = 1e300, worstBessel = 0.0;
    for (const auto& v : mit.values) {
      minIm = std::min(minIm, std::abs(v.value.imag()));
      // J_{l+1}(z) - i J_l(z) = 0 with l = m - 1/2
      const int l = static_cast<int>(std::lround(*v.mode - 0.5));
      const auto f = [l](cplx z) { return oracle::bessel_j(l + 1, z) - cplx(0.0, 1.0) * oracle::bessel_j(l, z); };
      worstBessel = std::max(worstBessel, std::abs(oracle::newton(f, v.value) - v.value));
    }
    o.require(minIm > 1e-6, "|Im lambda| > 1e-6");
    o.require(worstBessel <= 1e-8, "MIT roots match the Bessel equation");
    double worstReal = 0.0;
    for (const BoundaryCondition& bc :
         {BoundaryCondition::local(1), BoundaryCondition::local(-1), BoundaryCondition::aps(0.0),
          BoundaryCondition::aps(0.75), BoundaryCondition::maps(-0.5, 1), BoundaryCondition::maps(0.5, -1)}) {
      const SpectrumResult sr = spectrum(kDisk, bc, 10, 256);
      double maxIm = 0.0, maxAbs = 0.0;
      for (const auto& v : sr.values) {
        maxIm = std::max(maxIm, std::abs(v.value.imag()));
        maxAbs = std::max(maxAbs, std::abs(v.value));
      }
      worstReal = std::max(worstReal, maxIm / std::max(maxAbs, 1e-300));
    }
    o.require(worstReal <= 1e-8, "max |Im| <= 1e-8 max |lambda|");
    o.detail << " min |Im| over 10 MIT roots = " << minIm << ", distance to Bessel roots " << worstBessel
             << "; local/APS/modified APS max|Im|/max|lambda| = " << worstReal;
  });

  criterion(6, "APS with b = 1/2 on the unit disk: equality by a parallel spinor", [](Outcome& o) {
    const double rhs = bound_aps(kDisk, 0.5);
    const SpectrumResult sr = spectrum(kDisk, BoundaryCondition::aps(0.5), 1, 256);
    const double lam = std::abs(sr.values.front().value);
    const int N = 256;
    const OperatorMatrix bd = boundary_dirac(kDisk, N);
    Eigen::VectorXcd s0(bd.size());
    for (Eigen::Index j = 0; j < bd.size(); ++j) s0[j] = j % 2 ? cplx(0.3, -0.2) : cplx(1.0, 0.5);
    const double defect = (bd.applyNodal(s0) - 0.5 * s0).norm() / s0.norm();
    o.require(std::abs(rhs) <= 1e-8, "rhs = 0");
    o.require(lam <= 1e-8, "lambda_min = 0");
    o.require(defect <= 1e-6, "constant trace is a 1/2-eigensection");
    o.detail << " rhs = " << rhs << ", |lambda_min| = " << lam << ", |D-bar s - s/2| / |s| = " << defect;
  });

  criterion(7, "modified APS pairing dichotomy, 50 random sections", [](Outcome& o) {
    std::mt19937_64 rng(7);
    const PlaneWaveSpinor s = random_plane_spinor(6, 3.0, rng);
    const PlaneWaveScalar phi = random_plane_scalar(4, 2.0, 0.3, rng);
    double worstZero = 0.0, worstExcess = -1e300;
    for (double b : {-1.0, -0.25, 0.0, 0.5, 1.5})
      for (int sign : {1, -1})
        for (int i = 0; i < 50; ++i) {
          const IdentityReport r =
              check_boundary_identity(kDisk, BoundaryCondition::maps(b, sign), s, phi, 0.0, 0.0, "maps", 128, &rng);
          if (b <= 0.0) worstZero = std::max(worstZero, std::abs(r.lhs));
          else worstExcess = std::max(worstExcess, r.lhs - b);
        }
    o.require(worstZero <= 1e-10, "pairing = 0 for b <= 0");
    o.require(worstExcess <= 1e-10, "pairing <= b |t|^2 for b > 0");
    o.detail << " b <= 0: max |pairing|/|t|^2 = " << worstZero << "; b > 0: max (pairing/|t|^2 - b) = "
             << worstExcess;
  });

  criterion(8, "scaling covariance of eigenvalues and bounds", [](Outcome& o) {
    double worst = 0.0;
    for (double sigma : {0.5, 2.0, 5.0}) {
      SuiteOptions so;
      so.suite = "scaling";
      so.sigma = sigma;
      for (const auto& c : run_suite(so)) {
        worst = std::max(worst, c.report.residual / c.report.scale);
        o.require(c.pass, c.report.identity + " at sigma " + std::to_string(sigma));
      }
    }
    o.detail << " worst relative deviation " << worst << " <= 1e-8 for sigma in {1/2, 2, 5}";
  });

  criterion(9, "Thm2 on the round 3-sphere", [](Outcome& o) {
    const DiracBundleSpec s3{make_sphere(3, 1.0), 0.0};
    const double rhs = bound_thm2(s3);
    const SpectrumResult sr = spectrum(s3, BoundaryCondition::none(), 1, 512, 1);
    const double lam2 = std::norm(sr.values.front().value);
    o.require(std::abs(rhs - 2.25) <= 1e-10, "rhs = 9/4");
    o.require(std::abs(lam2 - 2.25) <= 1e-5, "lambda^2 = 9/4");
    o.detail << " rhs = " << rhs << ", lambda^2 = " << lam2 << " (exact 9/4)";
  });

  criterion(10, "convergence orders", [](Outcome& o) {
    const DiracBundleSpec s2{make_sphere(2, 1.0), 0.0};
    const ConvergenceStudy disk = run_convergence(kDisk, BoundaryCondition::local(1), "lambda", 64, 4, 4, 1);
    const ConvergenceStudy sph = run_convergence(s2, BoundaryCondition::none(), "lambda", 64, 4, 2, 1);
    o.require(disk.order && *disk.order >= 1.9, "disk eigenvalue order >= 1.9");
    o.require(sph.order && *sph.order >= 1.9, "sphere eigenvalue order >= 1.9");
    o.detail << " eigenvalues: disk " << (disk.order ? *disk.order : NAN) << ", sphere "
             << (sph.order ? *sph.order : NAN) << "; boundary identities:";
    for (const char* q : {"b1", "DD", "D"}) {
      const ConvergenceStudy st = run_convergence(kDisk, BoundaryCondition::mit(1), q, 64, 4, 4, 1);
      bool exact = true;
      for (const auto& p : st.points) exact = exact && p.residual <= 1e-12;
      o.require(exact || (st.order && *st.order >= 1.0), std::string(q) + " order >= 1");
      o.detail << " " << q << " ";
      if (st.order) o.detail << *st.order;
      else o.detail << (exact ? "exact to rounding" : "no order");
    }
  });

  const double total = seconds_since(start);
  criterion(11, "wall-clock of the full acceptance run", [total](Outcome& o) {
    o.require(total <= 300.0, "<= 300 s");
    o.detail << " " << total << " s <= 300 s";
  });

  std::printf("%s: %d of 11 criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
