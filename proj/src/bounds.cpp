#include "diracbound/bounds.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "diracbound/clifford.hpp"
#include "diracbound/errors.hpp"

namespace db {

namespace {
constexpr double kPi = std::numbers::pi;

double min_boundary_H(const GeometricInvariants& inv) {
  double h = INFINITY;
  for (const auto& c : inv.boundary) h = std::min(h, c.meanCurvature);
  return h;
}

// Nodal per-mode values f1 (cell centres) and f2 (nodes, dropped nodes are zero / unknown).
struct ModeValues {
  int N = 0;
  double a = 0.0, h = 0.0;
  std::vector<cplx> f1;  // index 1..N
  std::vector<cplx> f2;  // index 0..N
  std::vector<bool> known2;
};

ModeValues mode_values(const OperatorMatrix& op, const RadialMode& m, const Eigen::VectorXcd& v) {
  ModeValues mv;
  const Eigen::VectorXcd nodal = v.cwiseQuotient(op.weights.cwiseSqrt().cast<cplx>());
  mv.h = op.h;
  mv.a = m.a;
  mv.N = static_cast<int>(std::lround((m.b - m.a) / op.h));
  mv.f1.assign(mv.N + 1, 0.0);
  mv.f2.assign(mv.N + 1, 0.0);
  mv.known2.assign(mv.N + 1, false);
  for (Eigen::Index k = 0; k < op.size(); ++k) {
    const double x = op.coords[k];
    if (op.component[k] == 0) {
      mv.f1[static_cast<int>(std::lround((x - m.a) / op.h + 0.5))] = nodal[k];
    } else {
      const int i = static_cast<int>(std::lround((x - m.a) / op.h));
      mv.f2[i] = nodal[k];
      mv.known2[i] = true;
    }
  }
  // dropped boundary nodes carry f2 = 0 unless they sit at a singular end
  if (!m.singularLeft) mv.known2[0] = true;
  mv.known2[mv.N] = true;
  return mv;
}

struct KillingTerms {
  double residualSq = 0.0, normSq = 0.0;
  double crossRe = 0.0, gammaSq = 0.0;  // Re sum <grad s, X.s> and sum |X.s|^2
};

// Frame components on interior cells: theta gives (f1', f2') against (-f2, f1); phi gives
// (-i q1 f1, (kt + w'/2w) f2) against (i f2, f1).
KillingTerms killing_terms(const ModeValues& mv, const RadialMode& m, cplx lambda, int n) {
  KillingTerms t;
  const double h = mv.h;
  const cplx half = lambda / static_cast<double>(n);
  for (int j = 2; j <= mv.N - 1; ++j) {
    if (!mv.known2[j - 1] || !mv.known2[j]) continue;
    const double x = mv.a + (j - 0.5) * h, w = m.w(x);
    const cplx f1 = mv.f1[j];
    const cplx f2 = 0.5 * (mv.f2[j - 1] + mv.f2[j]);
    const cplx d1 = (mv.f1[j + 1] - mv.f1[j - 1]) / (2.0 * h);
    const cplx d2 = (mv.f2[j] - mv.f2[j - 1]) / h;
    const double q1 = m.q1(x), tk = m.kt(x) + 0.5 * m.dw(x) / w;
    const cplx I(0.0, 1.0);
    const cplx grad[4] = {d1, d2, -I * q1 * f1, tk * f2};
    const cplx gam[4] = {-f2, f1, I * f2, f1};
    for (int c = 0; c < 4; ++c) {
      t.residualSq += w * std::norm(grad[c] + half * gam[c]);
      t.crossRe += w * (grad[c] * std::conj(gam[c])).real();
      t.gammaSq += w * std::norm(gam[c]);
    }
    t.normSq += w * (std::norm(f1) + std::norm(f2));
  }
  return t;
}

bool per_mode_n2(const DiracBundleSpec& bundle, const OperatorMatrix& op) {
  return op.layout == Layout::Staggered && op.modeIndex && bundle.geometry.n == 2;
}

}  // namespace

const char* theorem_name(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::Thm2: return "Thm2";
    case Theorem::ThmAPS: return "ThmAPS";
    case Theorem::ThmModAPS: return "ThmModAPS";
    case Theorem::VolAPS: return "VolAPS";
    case Theorem::VolModAPS: return "VolModAPS";
  }
  return "T1";
}

Theorem parse_theorem(const std::string& s) {
  if (s == "t1") return Theorem::T1;
  if (s == "thm2") return Theorem::Thm2;
  if (s == "aps") return Theorem::ThmAPS;
  if (s == "maps") return Theorem::ThmModAPS;
  if (s == "volaps") return Theorem::VolAPS;
  if (s == "volmaps") return Theorem::VolModAPS;
  throw Error(ErrorKind::Config, "unknown theorem '" + s + "'");
}

double curvature_kappa(const DiracBundleSpec& bundle) { return curvature_endomorphism(bundle).kappa; }

double bound_t1(const DiracBundleSpec& bundle) {
  validate(bundle);
  if (bundle.dim() != 2) throw Error(ErrorKind::Dimension, "Theorem T1 bound is for n = 2");
  const auto inv = invariants(bundle.geometry);
  return (2.0 * curvature_kappa(bundle) * inv.volume + inv.boundaryIntegralH()) / inv.volume;
}

double bound_thm2(const DiracBundleSpec& bundle, int resolution) {
  validate(bundle);
  const int n = bundle.dim();
  if (n < 3) throw Error(ErrorKind::Dimension, "Theorem 2 bound needs n >= 3");
  const double nn = n;
  return robin_min(bundle.geometry, nn / (nn - 2.0), nn / (nn - 1.0) * curvature_kappa(bundle),
                   [nn](const BoundaryComponent& c) { return 0.5 * nn * c.meanCurvature; }, resolution)
      .value;
}

double bound_aps(const DiracBundleSpec& bundle, double b, int resolution) {
  validate(bundle);
  const double nn = bundle.dim();
  const double kappa = curvature_kappa(bundle);
  auto beta = [nn, b](const BoundaryComponent& c) { return 0.5 * (nn - 1.0) * c.meanCurvature - b; };
  if (b <= 0.0) return nn / (nn - 1.0) * robin_min(bundle.geometry, nn / (nn - 1.0), kappa, beta, resolution).value;
  return robin_min(bundle.geometry, 1.0, kappa, beta, resolution).value;
}

double bound_maps(const DiracBundleSpec& bundle, double b, int resolution) {
  validate(bundle);
  if (b > 0.0) return bound_aps(bundle, b, resolution);
  const double nn = bundle.dim();
  auto beta = [nn](const BoundaryComponent& c) { return 0.5 * (nn - 1.0) * c.meanCurvature; };
  return nn / (nn - 1.0) *
         robin_min(bundle.geometry, nn / (nn - 1.0), curvature_kappa(bundle), beta, resolution).value;
}

double sobolev_constant(int n) {
  if (n < 3) throw Error(ErrorKind::Dimension, "S_n is defined for n >= 3");
  const double nn = n;
  return std::pow(2.0 * std::tgamma(nn) / std::tgamma(0.5 * nn), 2.0 / nn) / (kPi * nn * (nn - 2.0));
}

BoundReport bound_volume(const DiracBundleSpec& bundle, double b, double gamma, bool modified,
                         std::optional<double> lambdaSq) {
  validate(bundle);
  const int n = bundle.dim();
  if (n < 3) throw Error(ErrorKind::Dimension, "volume bounds need n >= 3");
  const double nn = n, S = sobolev_constant(n);
  const auto inv = invariants(bundle.geometry);
  const double kappa = curvature_kappa(bundle);
  const double H = inv.hasBoundary ? min_boundary_H(inv) : INFINITY;
  BoundReport r;
  r.theorem = modified ? Theorem::VolModAPS : Theorem::VolAPS;
  std::ostringstream os;
  os.precision(10);
  if (b <= 0.0) {
    const double kNeed = nn * gamma / ((nn - 1.0) * S);
    const double hNeed = 2.0 * nn * nn * gamma / (std::pow(nn - 1.0, 3) * S);
    r.hypothesesOk = kappa >= kNeed && H >= hNeed;
    r.rhs = nn * nn / ((nn - 1.0) * (nn - 1.0) * S * std::pow(inv.volume, 2.0 / nn));
    os << "kappa=" << kappa << (kappa >= kNeed ? ">=" : "<") << kNeed << "; H=" << H << (H >= hNeed ? ">=" : "<")
       << hNeed;
  } else {
    const double kNeed = gamma / S;
    const double hNeed = 2.0 * gamma / ((nn - 1.0) * S);
    r.hypothesesOk = kappa >= kNeed && H > hNeed;
    r.rhs = 1.0 / (S * std::pow(inv.volume, 2.0 / nn));
    os << "kappa=" << kappa << (kappa >= kNeed ? ">=" : "<") << kNeed << "; H=" << H << (H > hNeed ? ">" : "<=")
       << hNeed;
  }
  r.hypotheses = os.str();
  r.lhs = lambdaSq ? *lambdaSq : NAN;
  r.gap = r.lhs - r.rhs;
  return r;
}

double killing_residual(const DiracBundleSpec& bundle, const OperatorMatrix& op, const Eigen::VectorXcd& v,
                        cplx lambda) {
  if (op.layout == Layout::Fourier) {
    // closed torus: int |grad s + (lambda/n) X.s|^2 = <lap s,s> + lambda^2/n - (2 lambda/n) Re<Ds,s>
    const OperatorMatrix lap = assemble_connection_laplacian(bundle, op.resolution);
    const Eigen::VectorXcd u = v / v.norm();
    const double lam = lambda.real(), nn = bundle.dim();
    const double val = u.dot(lap.entries * u).real() + lam * lam / nn - 2.0 * lam / nn * u.dot(op.entries * u).real();
    return std::sqrt(std::max(0.0, val));
  }
  if (!per_mode_n2(bundle, op)) throw Error(ErrorKind::Capability, "pointwise Killing residual needs an n = 2 mode");
  const RadialMode m = operator_mode(bundle, op);
  const KillingTerms t = killing_terms(mode_values(op, m, v), m, lambda, 2);
  return std::sqrt(t.residualSq / t.normSq);
}

double fitted_killing_constant(const DiracBundleSpec& bundle, const OperatorMatrix& op, const Eigen::VectorXcd& v) {
  if (!per_mode_n2(bundle, op)) throw Error(ErrorKind::Capability, "fitted Killing constant needs an n = 2 mode");
  const RadialMode m = operator_mode(bundle, op);
  const KillingTerms t = killing_terms(mode_values(op, m, v), m, 0.0, 2);
  return t.crossRe / t.gammaSq;
}

EqualityDiagnostics equality_diagnostics(const DiracBundleSpec& bundle, const OperatorMatrix& op,
                                         const EigenResult& result) {
  if (result.vectors.empty() || result.eigenvalues.empty())
    throw Error(ErrorKind::Argument, "equality diagnostics need an eigenvector");
  const Eigen::VectorXcd& v = result.vectors.front();
  const cplx lambda = result.eigenvalues.front();
  const auto inv = invariants(bundle.geometry);
  const double kappa = curvature_kappa(bundle);
  const double nn = bundle.dim();
  EqualityDiagnostics d;
  d.meanCurvatureMax = inv.meanCurvatureMaxAbs();
  d.kappaRelation = std::abs(kappa - (nn - 1.0) * std::norm(lambda) / nn);
  // curvature term is diagonal in every layout: R/4 + B on upper, R/4 - B on lower components
  const double up = inv.scalarCurvature / 4.0 + bundle.field(), lo = inv.scalarCurvature / 4.0 - bundle.field();
  double num = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    num += std::norm(v[k]) * std::pow((op.component[k] == 0 ? up : lo) - kappa, 2);
  d.curvatureResidual = std::sqrt(num) / v.norm();
  if (op.layout == Layout::Fourier || per_mode_n2(bundle, op)) {
    d.killingResidual = killing_residual(bundle, op, v, lambda);
  } else if (!inv.hasBoundary && lambda.imag() == 0.0) {
    // closed n = 3 mode: int |grad s|^2 = lambda^2 - R/4 by the Bochner identity
    const double lam2 = std::norm(lambda);
    d.killingResidual = std::sqrt(std::max(0.0, lam2 - inv.scalarCurvature / 4.0 + lam2 / nn - 2.0 * lam2 / nn));
  }
  return d;
}

}  // namespace db
