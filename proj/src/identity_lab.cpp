#include "diracbound/identity_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "diracbound/bounds.hpp"
#include "diracbound/errors.hpp"
#include "diracbound/spectrum.hpp"

namespace db {

namespace {

const cplx I(0.0, 1.0);
using V2 = std::array<double, 2>;

double re_ip(const Vec2& a, const Vec2& b) { return b.dot(a).real(); }

IdentityReport make_report(const std::string& id, double lhs, double rhs) {
  IdentityReport r;
  r.identity = id;
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = std::abs(lhs - rhs);
  r.scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  return r;
}

// Dirac symbol of a plane wave with momentum p: -(sigma1 p1 + sigma2 p2).
Vec2 symbol_dirac(const V2& p, const Vec2& c) {
  Vec2 o;
  o(0) = -(p[0] - I * p[1]) * c(1);
  o(1) = -(p[0] + I * p[1]) * c(0);
  return o;
}

// D s as a plane-wave sum with coefficients from the assembled torus operator.
PlaneWaveSpinor dirac_from_operator(const DiracBundleSpec& bundle, const PlaneWaveSpinor& s, int resolution) {
  const OperatorMatrix op = assemble_dirac(bundle, resolution);
  const auto modes = torus_modes(bundle, resolution);
  std::map<std::pair<int, int>, int> index;
  const auto& g = bundle.geometry;
  const double L1 = g.len(g.L1), L2 = g.len(g.L2);
  for (std::size_t j = 0; j < modes.size(); ++j) index[{modes[j].k1, modes[j].k2}] = static_cast<int>(j);
  PlaneWaveSpinor out;
  for (std::size_t k = 0; k < s.p.size(); ++k) {
    const int k1 = static_cast<int>(std::lround(s.p[k][0] * L1 / (2 * M_PI) - 0.5 * g.spin[0]));
    const int k2 = static_cast<int>(std::lround(s.p[k][1] * L2 / (2 * M_PI) - 0.5 * g.spin[1]));
    const auto it = index.find({k1, k2});
    if (it == index.end()) throw Error(ErrorKind::Resolution, "section is not resolved by the Fourier operator");
    const int o = 2 * it->second;
    if (std::abs(modes[it->second].p1 - s.p[k][0]) > 1e-9 * (1 + std::abs(s.p[k][0])) ||
        std::abs(modes[it->second].p2 - s.p[k][1]) > 1e-9 * (1 + std::abs(s.p[k][1])))
      throw Error(ErrorKind::Argument, "section is not a section of the torus spin structure");
    out.p.push_back(s.p[k]);
    out.c.push_back(op.entries.block(o, o, 2, 2) * s.c[k]);
  }
  return out;
}

struct Sample {
  SpinorJet s;
  Vec2 Dterm;   // from the jet
  Vec2 Dop;     // from the operator or symbol path
  ScalarJet phi;
  double w;
};

struct BSample {
  SpinorJet s;
  ScalarJet phi;
  double w;
  V2 nu, e;
};

struct Samples {
  std::vector<Sample> in;
  std::vector<BSample> bd;
  double H = 0.0;
  int n = 2;
};

bool is_flat_torus(const GeometrySpec& g) { return g.kind == GeometryKind::FlatTorus2; }
bool is_flat_disk(const GeometrySpec& g) { return g.kind == GeometryKind::UnitDisk && g.n == 2; }

void require_flat(const DiracBundleSpec& bundle) {
  validate(bundle);
  const auto& g = bundle.geometry;
  if (!is_flat_torus(g) && !is_flat_disk(g))
    throw Error(ErrorKind::Capability, "identity checks run on the flat torus and the flat 2-disk");
  if (bundle.field() != 0.0) throw Error(ErrorKind::Capability, "identity checks need an untwisted bundle");
}

Samples sample(const DiracBundleSpec& bundle, const PlaneWaveSpinor& s, const PlaneWaveScalar& phi, int resolution) {
  require_flat(bundle);
  if (resolution < 8) throw Error(ErrorKind::Resolution, "resolution must be at least 8");
  const auto& g = bundle.geometry;
  Samples out;
  PlaneWaveSpinor Ds;
  std::vector<QuadPoint> q;
  if (is_flat_torus(g)) {
    Ds = dirac_from_operator(bundle, s, resolution);
    q = torus_quadrature(g, std::max(4 * resolution, 64));
  } else {
    Ds.p = s.p;
    for (std::size_t k = 0; k < s.p.size(); ++k) Ds.c.push_back(symbol_dirac(s.p[k], s.c[k]));
    q = disk_quadrature(g, std::max(resolution / 2, 16), std::max(resolution, 32));
    const auto bp = disk_boundary(g, std::max(resolution, 32));
    out.H = 1.0 / g.len(g.radius);
    for (const auto& b : bp) out.bd.push_back({s.at(b.x, b.y), phi.at(b.x, b.y), b.w, b.nu, b.e});
  }
  out.in.reserve(q.size());
  for (const auto& p : q) {
    Sample smp;
    smp.s = s.at(p.x, p.y);
    smp.Dterm = dirac_of(smp.s);
    smp.Dop = Ds.at(p.x, p.y).s;
    smp.phi = phi.at(p.x, p.y);
    smp.w = p.w;
    out.in.push_back(smp);
  }
  return out;
}

double norm2(const Vec2& v) { return v.squaredNorm(); }

// |P_{eta,psi} s|^2 with d psi = c * d phi.
double twistor_sq(const TwistorParams& tp, const Sample& x, double c) {
  const V2 gp{c * x.phi.grad[0], c * x.phi.grad[1]};
  const Vec2 gs = cliff(gp, x.s.s);
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    const V2 ei{i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0};
    const Vec2 t = tp.eta1 * x.s.d[i] + tp.eta2 * cliff(ei, x.Dterm) - tp.eta1 * gp[i] * x.s.s - tp.eta2 * cliff(ei, gs);
    sum += norm2(t);
  }
  return sum;
}

double grad_sq(const ScalarJet& f) { return f.grad[0] * f.grad[0] + f.grad[1] * f.grad[1]; }

// Boundary integrands: sum <nu e_a nabla_a s, s>, <nu . grad phi . s, s>, nu(phi) |s|^2.
struct BoundaryTerms {
  double bterm, nugrad, nuphi;
};

BoundaryTerms boundary_terms(const BSample& b) {
  Vec2 tang = b.e[0] * b.s.d[0] + b.e[1] * b.s.d[1];
  const double bterm = re_ip(cliff(b.nu, cliff(b.e, tang)), b.s.s);
  const double nugrad = re_ip(cliff(b.nu, cliff(b.phi.grad, b.s.s)), b.s.s);
  const double nuphi = (b.nu[0] * b.phi.grad[0] + b.nu[1] * b.phi.grad[1]) * norm2(b.s.s);
  return {bterm, nugrad, nuphi};
}

std::pair<double, double> est1_sides(const Samples& S, const TwistorParams& tp, double tau, double delta) {
  const double xi = tp.xi;
  const double c = tau + (1.0 / xi - 1.0) * delta;
  double lhs = 0.0, rhs = 0.0;
  for (const auto& x : S.in) {
    const double wt = x.w * std::exp(2 * (delta - tau) * x.phi.f);
    const Vec2 Dstar = x.Dop - tau * cliff(x.phi.grad, x.s.s);
    lhs += norm2(Dstar) * wt;
    const double s2 = norm2(x.s.s);
    rhs += (xi - 1) * delta / xi * (x.phi.lap + (xi + 1) * delta / xi * grad_sq(x.phi)) * s2 * wt;
    rhs += (1 - xi) * twistor_sq(tp, x, c) / (tp.eta1 * tp.eta1) * wt;
  }
  for (const auto& b : S.bd) {
    const double wt = b.w * std::exp(2 * (delta - tau) * b.phi.f);
    const BoundaryTerms t = boundary_terms(b);
    rhs += (xi - 1) * t.bterm * wt + (tau - delta) * (1 - xi) * t.nugrad * wt +
           ((1 - xi) * tau + (1 / xi + xi - 2) * delta) * t.nuphi * wt;
  }
  return {lhs, rhs};
}

std::pair<double, double> est11_sides(const Samples& S, double tau, double delta) {
  const int n = S.n;
  const TwistorParams P = twistor_params(1.0, 1.0 / n, n);
  double lhs = 0.0, rhs = 0.0;
  for (const auto& x : S.in) {
    const double wt = x.w * std::exp(2 * (delta - tau) * x.phi.f);
    const Vec2 Dstar = x.Dop - tau * cliff(x.phi.grad, x.s.s);
    lhs += norm2(Dstar) * wt;
    rhs += n * delta * (x.phi.lap + (2 - n) * delta * grad_sq(x.phi)) * norm2(x.s.s) * wt;
    rhs += static_cast<double>(n) / (n - 1) * twistor_sq(P, x, tau - n * delta) * wt;
  }
  for (const auto& b : S.bd) {
    const double wt = b.w * std::exp(2 * (delta - tau) * b.phi.f);
    const BoundaryTerms t = boundary_terms(b);
    rhs += -static_cast<double>(n) / (n - 1) * t.bterm * wt + n * (tau - delta) / (n - 1) * t.nugrad * wt +
           n * (tau - n * delta) / (n - 1) * t.nuphi * wt;
  }
  return {lhs, rhs};
}

std::pair<double, double> est2_sides(const Samples& S, double tau, double r) {
  double lhs = 0.0, rhs = 0.0;
  for (const auto& x : S.in) {
    const double wt = x.w * std::exp(-2 * tau * x.phi.f);
    const Vec2 Dstar = x.Dop - tau * cliff(x.phi.grad, x.s.s);
    lhs += norm2(Dstar) * wt;
    rhs += -r * (x.phi.lap + r * grad_sq(x.phi)) * norm2(x.s.s) * wt;
    double nab = 0.0;
    for (int i = 0; i < 2; ++i) nab += norm2(x.s.d[i] - (tau + r) * x.phi.grad[i] * x.s.s);
    rhs += nab * wt;
  }
  for (const auto& b : S.bd) {
    const double wt = b.w * std::exp(-2 * tau * b.phi.f);
    const BoundaryTerms t = boundary_terms(b);
    rhs += -t.bterm * wt + tau * t.nugrad * wt + (tau + r) * t.nuphi * wt;
  }
  return {lhs, rhs};
}

std::pair<double, double> unw_sides(const Samples& S, const TwistorParams& tp) {
  double lhs = 0.0, rhs = 0.0;
  for (const auto& x : S.in) {
    lhs += tp.normSq * norm2(x.Dop) * x.w;
    rhs += twistor_sq(tp, x, 0.0) * x.w;
  }
  for (const auto& b : S.bd) rhs -= tp.eta1 * tp.eta1 * boundary_terms(b).bterm * b.w;
  return {lhs, rhs};
}

// Largest pointwise defect of PP2 (weight psi = phi).
IdentityReport pp2_report(const Samples& S, const TwistorParams& tp) {
  IdentityReport worst = make_report("PP2", 0.0, 0.0);
  double best = -1.0;
  for (const auto& x : S.in) {
    const Vec2 gs = cliff(x.phi.grad, x.s.s);
    const double lhs = twistor_sq(tp, x, 0.0) + 2 * (tp.eta1 * tp.eta1 - tp.normSq) * re_ip(gs, x.Dop);
    const double s2 = norm2(x.s.s);
    const double div = 2 * re_ip(x.s.d[0], x.s.s) * x.phi.grad[0] + 2 * re_ip(x.s.d[1], x.s.s) * x.phi.grad[1] +
                       s2 * x.phi.lap;
    const double rhs = twistor_sq(tp, x, 1.0) + tp.eta1 * tp.eta1 * div -
                       (tp.eta1 * tp.eta1 * x.phi.lap + tp.normSq * grad_sq(x.phi)) * s2;
    const double d = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
    if (d > best) {
      best = d;
      worst = make_report("PP2", lhs, rhs);
    }
  }
  worst.note = "pointwise; largest defect over the quadrature points";
  return worst;
}

void check_eta(const TwistorParams& tp) {
  if (tp.eta1 == 0.0 && tp.eta2 == 0.0) throw Error(ErrorKind::Parameter, "eta must be nonzero");
  if (tp.eta1 == 0.0) throw Error(ErrorKind::Parameter, "eta1 must be nonzero");
}

double small_root_e2(int n, double xi) {
  const double a = n * (1 - xi), b = -2 * (1 - xi), c = -xi;
  return (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

// Boundary data of the disk at N equispaced points.
struct Trace {
  std::vector<BoundaryPoint> pts;
  std::vector<Vec2> s;
  std::vector<ScalarJet> phi;
  double H = 1.0, ds = 0.0;
};

Mat2 cliff_matrix(const V2& X) {
  Mat2 m;
  m.col(0) = cliff(X, Vec2(1.0, 0.0));
  m.col(1) = cliff(X, Vec2(0.0, 1.0));
  return m;
}

// Orthogonal projector onto the sections satisfying the MIT or local condition at normal nu.
Mat2 condition_projector(const BoundaryCondition& bc, const V2& nu) {
  const Mat2 Id = Mat2::Identity();
  const Mat2 N = cliff_matrix(nu);
  if (bc.kind == BCKind::MITBag) return 0.5 * (Id - static_cast<double>(bc.sign) * I * N);
  if (bc.kind == BCKind::LocalChirality) {
    Mat2 w = Mat2::Zero();
    w(0, 0) = 1.0;
    w(1, 1) = -1.0;
    return 0.5 * (Id + static_cast<double>(bc.sign) * N * w);
  }
  throw Error(ErrorKind::Argument, "pointwise projection needs the MIT or the local condition");
}

Trace boundary_trace(const DiracBundleSpec& bundle, const PlaneWaveSpinor& s, const PlaneWaveScalar& phi, int N,
                     const std::optional<BoundaryCondition>& project) {
  const auto& g = bundle.geometry;
  Trace t;
  t.pts = disk_boundary(g, N);
  t.H = 1.0 / g.len(g.radius);
  t.ds = 2 * M_PI * g.len(g.radius) / N;
  for (const auto& p : t.pts) {
    Vec2 v = s.at(p.x, p.y).s;
    if (project) v = condition_projector(*project, p.nu) * v;
    t.s.push_back(v);
    t.phi.push_back(phi.at(p.x, p.y));
  }
  return t;
}

Vec2 tangential_fd(const Trace& t, int j) {
  const int N = static_cast<int>(t.s.size());
  return (t.s[(j + 1) % N] - t.s[(j + N - 1) % N]) / (2 * t.ds);
}

IdentityReport worst_of(const std::string& id, const std::vector<std::pair<double, double>>& sides) {
  IdentityReport worst = make_report(id, 0.0, 0.0);
  double best = -1.0;
  for (const auto& [l, r] : sides)
    if (std::abs(l - r) > best) {
      best = std::abs(l - r);
      worst = make_report(id, l, r);
    }
  worst.note = "pointwise; largest defect over the boundary points";
  return worst;
}

void require_disk_boundary(const DiracBundleSpec& bundle) {
  validate(bundle);
  const auto& g = bundle.geometry;
  if (!invariants(g).hasBoundary) throw Error(ErrorKind::NoBoundary, "geometry has no boundary");
  if (!is_flat_disk(g)) throw Error(ErrorKind::Capability, "boundary identities run on the flat 2-disk");
  if (bundle.field() != 0.0) throw Error(ErrorKind::Capability, "boundary identities need an untwisted bundle");
}

Eigen::VectorXcd stack(const std::vector<Vec2>& v) {
  Eigen::VectorXcd out(2 * v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out.segment<2>(2 * j) = v[j];
  return out;
}

// Eigen-decomposition of the boundary Dirac operator, shared between repeated projections.
struct BoundarySpectrum {
  OperatorMatrix op;
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

std::shared_ptr<const BoundarySpectrum> boundary_spectrum(const DiracBundleSpec& bundle, int N) {
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double, int>, std::shared_ptr<const BoundarySpectrum>> cache;
  const auto& g = bundle.geometry;
  const auto key = std::make_tuple(static_cast<int>(g.kind), g.len(g.radius), bundle.field(), N);
  {
    std::lock_guard<std::mutex> lock(mutex);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto spec = std::make_shared<BoundarySpectrum>();
  spec->op = boundary_dirac(bundle, N);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(spec->op.entries);
  spec->values = es.eigenvalues();
  spec->vectors = es.eigenvectors();
  std::lock_guard<std::mutex> lock(mutex);
  if (cache.size() > 16) cache.clear();
  return cache.emplace(key, std::move(spec)).first->second;
}

}  // namespace

std::optional<double> fitted_order(const std::vector<std::pair<double, double>>& series, double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& [h, r] : series) {
    if (!(r > floor) || !(h > 0)) continue;
    const double x = std::log(h), y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::nullopt;
  const double den = m * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (m * sxy - sx * sy) / den;
}

IdentityReport check_bochner(const DiracBundleSpec& bundle, int resolution, bool refine, int modes) {
  validate(bundle);
  const auto& g = bundle.geometry;
  if (!has_mode_reduction(g)) {
    const OperatorMatrix D = assemble_dirac(bundle, resolution);
    const OperatorMatrix L = assemble_connection_laplacian(bundle, resolution);
    const OperatorMatrix R = assemble_curvature(bundle, resolution);
    const Eigen::MatrixXcd defect = D.entries * D.entries - L.entries - R.entries;
    IdentityReport r = make_report("bochner", 0.0, 0.0);
    r.residual = defect.cwiseAbs().maxCoeff();
    r.lhs = (D.entries * D.entries).cwiseAbs().maxCoeff();
    r.rhs = (L.entries + R.entries).cwiseAbs().maxCoeff();
    r.scale = std::max({r.lhs, r.rhs, 1.0});
    r.note = "max entry of D^2 - (connection Laplacian + curvature)";
    return r;
  }
  if (g.n != 2) throw Error(ErrorKind::Capability, "per-mode Bochner check is available for n = 2");
  if (modes < 1) throw Error(ErrorKind::Parameter, "mode count must be positive");
  std::vector<int> parities{+1};
  if (g.kind == GeometryKind::RoundSphere) parities.push_back(-1);

  auto at = [&](int res) {
    double worst = 0.0, span = 1.0;
    for (int sign : {+1, -1})
      for (int i = 0; i < modes; ++i)
        for (int parity : parities) {
          const double label = mode_label(bundle, i, sign);
          const OperatorMatrix D = assemble_dirac(bundle, res, label, parity);
          const OperatorMatrix L = assemble_connection_laplacian(bundle, res, label, parity);
          const OperatorMatrix R = assemble_curvature(bundle, res, label, parity);
          const RadialMode m = operator_mode(bundle, D);
          const double a = m.a, b = m.b;
          span = b - a;
          // smooth bump supported in the middle half of the interval
          auto bump = [a, b](double x) {
            const double t = (x - a) / (b - a);
            if (t <= 0.25 || t >= 0.75) return 0.0;
            const double sn = std::sin(2 * M_PI * (t - 0.25));
            return sn * sn * sn * sn;
          };
          const SpinorField f = sample_mode_field(
              D, [&](double x) { return cplx(bump(x), 0.0); },
              [&](double x) { return cplx(0.3, 1.0) * bump(x) * (1.0 + (x - a) / (b - a)); }, a, b);
          const Eigen::VectorXcd DDs = D.applyNodal(D.applyNodal(f.values));
          const Eigen::VectorXcd rhs = L.applyNodal(f.values) + R.applyNodal(f.values);
          const double scale = std::max(DDs.cwiseAbs().maxCoeff(), 1e-300);
          worst = std::max(worst, (DDs - rhs).cwiseAbs().maxCoeff() / scale);
        }
    return std::make_pair(span / res, worst);
  };

  IdentityReport r = make_report("bochner", 0.0, 0.0);
  const auto base = at(resolution);
  r.residual = base.second;
  r.note = "per-mode, smooth compactly supported sections; residual relative to |D^2 s|";
  if (refine) {
    for (int res : {64, 128, 256, 512}) r.resolutionSeries.push_back(at(res));
    r.order = fitted_order(r.resolutionSeries);
  }
  return r;
}

IdentityReport check_weighted_identity(const DiracBundleSpec& bundle, const PlaneWaveSpinor& s, const WeightParams& w,
                                       const TwistorParams& tp, const std::string& variant, int resolution) {
  if (variant != "unw" && variant != "PP2" && variant != "est1" && variant != "est11" && variant != "est2")
    throw Error(ErrorKind::Argument, "unknown identity variant '" + variant + "'");
  if (variant == "unw" || variant == "PP2" || variant == "est1") check_eta(tp);
  if (variant == "est1" && tp.xi == 0.0) throw Error(ErrorKind::Parameter, "est1 needs xi != 0");
  if (variant == "est2" && w.r == 0.0) throw Error(ErrorKind::Parameter, "est2 needs r != 0");
  if (tp.n != bundle.dim()) throw Error(ErrorKind::Dimension, "twistor parameters of another dimension");
  Samples S = sample(bundle, s, w.phi, resolution);
  S.n = bundle.dim();
  if (variant == "PP2") return pp2_report(S, tp);
  std::pair<double, double> sides;
  if (variant == "unw") sides = unw_sides(S, tp);
  else if (variant == "est1") sides = est1_sides(S, tp, w.tau, w.delta);
  else if (variant == "est11") sides = est11_sides(S, w.tau, w.delta);
  else sides = est2_sides(S, w.tau, w.r);
  return make_report(variant, sides.first, sides.second);
}

IdentityReport check_est2_limit(const DiracBundleSpec& bundle, const PlaneWaveSpinor& s, const WeightParams& w,
                                int resolution) {
  if (w.r == 0.0) throw Error(ErrorKind::Parameter, "est2 needs r != 0");
  Samples S = sample(bundle, s, w.phi, resolution);
  S.n = bundle.dim();
  const auto ref = est2_sides(S, w.tau, w.r);
  IdentityReport r = make_report("est2-limit", 0.0, ref.second);
  for (double dl : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double xi = dl / w.r;
    const TwistorParams tp = twistor_params(1.0, small_root_e2(S.n, xi), S.n);
    const auto sides = est1_sides(S, tp, w.tau, dl);
    r.resolutionSeries.push_back({dl, std::abs(sides.second - ref.second)});
    r.lhs = sides.second;
  }
  r.residual = std::abs(r.lhs - r.rhs);
  r.scale = std::max({std::abs(r.lhs), std::abs(r.rhs), 1.0});
  r.order = fitted_order(r.resolutionSeries);
  r.note = "series is (delta, |RHS est1 - RHS est2|); order is the slope in delta";
  return r;
}

IdentityReport check_boundary_identity(const DiracBundleSpec& bundle, const BoundaryCondition& bc,
                                       const PlaneWaveSpinor& s, const PlaneWaveScalar& phi, double tau, double delta,
                                       const std::string& variant, int resolution, std::mt19937_64* rng) {
  require_disk_boundary(bundle);
  if (resolution < 8) throw Error(ErrorKind::Resolution, "resolution must be at least 8");
  const int N = resolution;
  if (variant == "b1" || variant == "b2") {
    const Trace t = boundary_trace(bundle, s, phi, N, bc);
    std::vector<std::pair<double, double>> sides;
    for (int j = 0; j < N; ++j) {
      const auto& p = t.pts[j];
      const double s2 = norm2(t.s[j]);
      if (variant == "b1") {
        const Vec2 d = tangential_fd(t, j);
        sides.push_back({re_ip(cliff(p.nu, cliff(p.e, d)), t.s[j]), -0.5 * t.H * s2});
      } else {
        const double nuphi = p.nu[0] * t.phi[j].grad[0] + p.nu[1] * t.phi[j].grad[1];
        sides.push_back({re_ip(cliff(p.nu, cliff(t.phi[j].grad, t.s[j])), t.s[j]), -nuphi * s2});
      }
    }
    return worst_of(variant, sides);
  }
  if (variant == "DD" || variant == "D") {
    const Trace t = boundary_trace(bundle, s, phi, N, std::nullopt);
    const OperatorMatrix Db = boundary_dirac(bundle, N);
    const Eigen::VectorXcd u = stack(t.s);
    const Eigen::VectorXcd Du = Db.entries * u;  // uniform weights: entries act on nodal values
    if (variant == "DD") {
      IdentityReport worst = make_report("DD", 0.0, 0.0);
      double best = -1.0;
      for (int j = 0; j < N; ++j) {
        const auto& p = t.pts[j];
        const Vec2 lhs = cliff(p.nu, cliff(p.e, tangential_fd(t, j)));
        const Vec2 rhs = Du.segment<2>(2 * j) - 0.5 * t.H * t.s[j];
        const double d = (lhs - rhs).norm();
        if (d > best) {
          best = d;
          worst.lhs = lhs.norm();
          worst.rhs = rhs.norm();
          worst.residual = d;
          worst.scale = std::max({worst.lhs, worst.rhs, 1.0});
        }
      }
      worst.note = "pointwise; residual is the norm of the spinor defect";
      return worst;
    }
    const double c = tau - delta;
    std::vector<std::pair<double, double>> sides;
    for (int j = 0; j < N; ++j) {
      const auto& p = t.pts[j];
      const ScalarJet& f = t.phi[j];
      const double s2 = norm2(t.s[j]);
      const double nuphi = p.nu[0] * f.grad[0] + p.nu[1] * f.grad[1];
      const double ephi = p.e[0] * f.grad[0] + p.e[1] * f.grad[1];
      const double lhs = re_ip(cliff(p.nu, cliff(p.e, tangential_fd(t, j))), t.s[j]) -
                         c * re_ip(cliff(p.nu, cliff(f.grad, t.s[j])), t.s[j]);
      // D-bar minus c times boundary Clifford multiplication by the tangential gradient
      const Vec2 Dstar = Du.segment<2>(2 * j) - c * cliff(p.nu, cliff({ephi * p.e[0], ephi * p.e[1]}, t.s[j]));
      const double rhs = re_ip(Dstar, t.s[j]) + (c * nuphi - 0.5 * t.H) * s2;
      sides.push_back({lhs, rhs});
    }
    return worst_of("D", sides);
  }
  if (variant == "maps") {
    if (bc.kind != BCKind::ModifiedAPS) throw Error(ErrorKind::Argument, "maps identity needs the modified APS condition");
    if (!rng) throw Error(ErrorKind::Argument, "maps identity needs a random source");
    const std::shared_ptr<const BoundarySpectrum> spec = boundary_spectrum(bundle, N);
    const OperatorMatrix& Db = spec->op;
    const Eigen::MatrixXcd& Q = spec->vectors;
    std::normal_distribution<double> nd(0.0, 1.0);
    // random trace band-limited to |k| <= N/4
    const auto pts = disk_boundary(bundle.geometry, N);
    const int band = N / 4;
    std::vector<Vec2> c(2 * band + 1);
    for (auto& v : c) v = Vec2(cplx(nd(*rng), nd(*rng)), cplx(nd(*rng), nd(*rng)));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * N);
    for (int j = 0; j < N; ++j)
      for (int k = -band; k <= band; ++k) v.segment<2>(2 * j) += c[k + band] * std::exp(I * (2 * M_PI * k * j / N));
    Eigen::VectorXcd coef = Q.adjoint() * v;
    // eigenvalues equal to b up to rounding belong to the admissible side
    const double cut = bc.b + 1e-9 * std::max(1.0, std::abs(bc.b));
    for (Eigen::Index i = 0; i < coef.size(); ++i)
      if (spec->values[i] > cut) coef[i] = 0.0;
    const Eigen::VectorXcd u0 = Q * coef;
    Eigen::VectorXcd t(2 * N);
    for (int j = 0; j < N; ++j) {
      const Vec2 uj = u0.segment<2>(2 * j);
      t.segment<2>(2 * j) = 0.5 * (uj - static_cast<double>(bc.sign) * cliff(pts[j].nu, uj));
    }
    const double w = Db.weights[0];
    const double pairing = w * t.dot(Db.entries * t).real();
    const double tt = w * t.squaredNorm();
    IdentityReport r;
    r.identity = "maps";
    r.lhs = pairing / tt;
    if (bc.b <= 0.0) {
      r.rhs = 0.0;
      r.residual = std::abs(r.lhs);
      r.note = "pairing / |t|^2, expected 0";
    } else {
      r.rhs = bc.b;
      r.residual = std::max(0.0, r.lhs - bc.b);
      r.note = "pairing / |t|^2, expected <= b; residual is the excess";
    }
    r.scale = 1.0;
    return r;
  }
  throw Error(ErrorKind::Argument, "unknown boundary identity '" + variant + "'");
}

IdentityReport boundary_identity_series(const DiracBundleSpec& bundle, const BoundaryCondition& bc,
                                        const PlaneWaveSpinor& s, const PlaneWaveScalar& phi, double tau, double delta,
                                        const std::string& variant) {
  IdentityReport out;
  for (int res : {64, 128, 256, 512}) {
    IdentityReport r = check_boundary_identity(bundle, bc, s, phi, tau, delta, variant, res);
    out.resolutionSeries.push_back({2 * M_PI * bundle.geometry.len(bundle.geometry.radius) / res, r.residual});
    const auto series = std::move(out.resolutionSeries);
    out = r;
    out.resolutionSeries = series;
  }
  // residuals at rounding level carry no order
  out.order = fitted_order(out.resolutionSeries, 1e-12 * out.scale);
  if (!out.order) out.note += "; exact to rounding at every resolution";
  return out;
}

IdentityReport check_ri(const DiracBundleSpec& bundle, const OperatorMatrix& op, const EigenResult& result, double a) {
  if (result.vectors.empty() || result.eigenvalues.empty())
    throw Error(ErrorKind::Argument, "Ricci identity check needs an eigenvector");
  const Eigen::VectorXcd& v = result.vectors.front();
  const int n = bundle.dim();
  Eigen::VectorXcd Rv;
  if (op.layout == Layout::Fourier) {
    Rv = assemble_curvature(bundle, op.resolution).entries * v;
  } else {
    const Mat2 R = curvature_endomorphism(bundle).value;
    Rv.resize(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) Rv[k] = R(op.component[k], op.component[k]) * v[k];
  }
  const double target = (n - 1) * n * a * a;
  const double vn = v.norm();
  IdentityReport r;
  r.identity = "RI";
  r.lhs = v.dot(Rv).real() / (vn * vn);
  r.rhs = target;
  r.residual = (Rv - target * v).norm() / vn;
  r.scale = std::max({std::abs(r.lhs), std::abs(r.rhs), 1.0});
  try {
    const double k = killing_residual(bundle, op, v, result.eigenvalues.front());
    r.note = "killing residual " + sci(k);
  } catch (const Error&) {
    r.note = "killing residual unavailable";
  }
  return r;
}

IdentityReport check_scaling(const DiracBundleSpec& bundle, const BoundaryCondition& bc, double sigma, int k,
                             int resolution) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::Parameter, "sigma must be positive");
  SpectrumOptions opts;
  opts.bc = bc;
  opts.k = k;
  opts.resolution = resolution;
  const DiracBundleSpec scaled = rescale(bundle, sigma);
  const SpectrumResult a = compute_spectrum(bundle, opts);
  const SpectrumResult b = compute_spectrum(scaled, opts);
  IdentityReport r = make_report("scaling", 0.0, 0.0);
  double top = 0.0;
  for (const auto& v : a.values) top = std::max(top, std::abs(v.value));
  const std::size_t m = std::min(a.values.size(), b.values.size());
  if (m == 0) throw Error(ErrorKind::Convergence, "no eigenvalues to compare");
  double worst = -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const cplx x = sigma * b.values[i].value, y = a.values[i].value;
    const double rel = std::abs(x - y) / std::max({std::abs(y), 1e-3 * top, 1e-300});
    if (rel > worst) {
      worst = rel;
      r.lhs = std::abs(x);
      r.rhs = std::abs(y);
    }
  }
  const Mat2 R0 = curvature_endomorphism(bundle).value, R1 = curvature_endomorphism(scaled).value;
  const double rnorm = R0.norm();
  const double rdev = (R1 - R0 / (sigma * sigma)).norm() / (rnorm > 0 ? rnorm : 1.0);
  const auto i0 = invariants(bundle.geometry), i1 = invariants(scaled.geometry);
  double hdev = 0.0;
  for (std::size_t c = 0; c < i0.boundary.size(); ++c) {
    const double h0 = i0.boundary[c].meanCurvature, h1 = i1.boundary[c].meanCurvature;
    hdev = std::max(hdev, std::abs(h1 - h0 / sigma) / std::max(std::abs(h0), 1e-300));
  }
  r.residual = std::max({worst, rdev, hdev});
  r.scale = 1.0;
  r.note = "relative deviations: eigenvalues " + sci(worst) + ", curvature " + sci(rdev) +
           ", mean curvature " + sci(hdev);
  return r;
}

}  // namespace db
