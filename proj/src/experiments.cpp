#include "diracbound/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "diracbound/errors.hpp"
#include "diracbound/parallel.hpp"

namespace db {

namespace {

constexpr double kIdentityTol = 1e-10;
constexpr int kTorusIdentityResolution = 16;
constexpr int kDiskIdentityResolution = 128;

bool flat_untwisted(const DiracBundleSpec& b) {
  const auto& g = b.geometry;
  return b.field() == 0.0 && (g.kind == GeometryKind::FlatTorus2 || (g.kind == GeometryKind::UnitDisk && g.n == 2));
}

bool is_disk2(const DiracBundleSpec& b) { return b.geometry.kind == GeometryKind::UnitDisk && b.geometry.n == 2; }

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

struct Instance {
  PlaneWaveSpinor s;
  WeightParams w;
  TwistorParams tp;
};

Instance random_instance(const DiracBundleSpec& bundle, std::mt19937_64& rng) {
  Instance in;
  const auto& g = bundle.geometry;
  if (g.kind == GeometryKind::FlatTorus2) {
    in.s = random_torus_spinor(g, 3, rng);
    in.w.phi = random_torus_scalar(g, 2, 0.15, rng);
  } else {
    const double R = g.len(g.radius);
    in.s = random_plane_spinor(6, 3.0 / R, rng);
    in.w.phi = random_plane_scalar(4, 2.0 / R, 0.3, rng);
  }
  in.w.tau = uniform(rng, -1.0, 1.0);
  in.w.delta = uniform(rng, -1.0, 1.0);
  static const double rs[] = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  in.w.r = rs[std::uniform_int_distribution<int>(0, 5)(rng)];
  do {
    const double e1 = uniform(rng, 0.5, 2.0) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    in.tp = twistor_params(e1, uniform(rng, -1.5, 1.5), bundle.dim());
  } while (std::abs(in.tp.xi) < 1e-3);
  return in;
}

CheckResult judged(IdentityReport r, bool pass, const std::string& criterion, const std::string& provenance) {
  CheckResult c;
  c.report = std::move(r);
  c.pass = pass;
  c.criterion = criterion;
  c.provenance = provenance;
  return c;
}

CheckResult relative_check(IdentityReport r, double tol, const std::string& provenance) {
  const bool pass = r.residual <= tol * r.scale;
  std::ostringstream os;
  os << "residual <= " << tol << " * scale";
  return judged(std::move(r), pass, os.str(), provenance);
}

void weighted_suite(const DiracBundleSpec& bundle, const SuiteOptions& opts, int instances,
                    std::vector<CheckResult>& out) {
  const int res = bundle.geometry.kind == GeometryKind::FlatTorus2 ? kTorusIdentityResolution : kDiskIdentityResolution;
  static const char* variants[] = {"unw", "PP2", "est1", "est11", "est2"};
  std::vector<std::array<IdentityReport, 5>> reports(instances);
  parallel_for(instances, [&](std::size_t i) {
    std::mt19937_64 rng = instance_rng(opts.seed, 1000 + i);
    const Instance in = random_instance(bundle, rng);
    for (int v = 0; v < 5; ++v) reports[i][v] = check_weighted_identity(bundle, in.s, in.w, in.tp, variants[v], res);
  });
  for (int v = 0; v < 5; ++v) {
    std::size_t worst = 0;
    for (int i = 1; i < instances; ++i)
      if (reports[i][v].residual / reports[i][v].scale > reports[worst][v].residual / reports[worst][v].scale) worst = i;
    IdentityReport r = reports[worst][v];
    r.identity = std::string(variants[v]) + (bundle.geometry.kind == GeometryKind::FlatTorus2 ? "/torus" : "/disk");
    r.note = (r.note.empty() ? "" : r.note + "; ") + "worst of " + std::to_string(instances) + " random instances";
    out.push_back(relative_check(std::move(r), kIdentityTol, "exact identity"));
  }
  std::mt19937_64 rng = instance_rng(opts.seed, 7);
  Instance in = random_instance(bundle, rng);
  IdentityReport lim = check_est2_limit(bundle, in.s, in.w, res);
  const bool pass = lim.order && *lim.order >= 0.9;
  out.push_back(judged(std::move(lim), pass, "slope in delta >= 0.9", "limit of the weighted identity"));
}

void identities_suite(const SuiteOptions& opts, const DiracBundleSpec& bundle, std::vector<CheckResult>& out) {
  weighted_suite(bundle, opts, opts.instances, out);
  if (bundle.geometry.kind == GeometryKind::FlatTorus2) {
    for (double B : {0.0, 2 * M_PI, 4 * M_PI}) {
      DiracBundleSpec tb{make_torus(1.0, 1.0), B};
      IdentityReport r = check_bochner(tb, kTorusIdentityResolution);
      r.identity = "bochner/torus B=" + sci(B);
      const bool pass = r.residual <= 1e-12;
      out.push_back(judged(std::move(r), pass, "max entry <= 1e-12", "exact identity"));
    }
  } else {
    IdentityReport r = check_bochner(bundle, 64, true);
    r.identity = "bochner/disk";
    const bool pass = r.order && *r.order >= 1.0;
    out.push_back(judged(std::move(r), pass, "fitted order >= 1", "refinement study"));
  }
}

void boundary_suite(const SuiteOptions& opts, const DiracBundleSpec& bundle, std::vector<CheckResult>& out) {
  if (!invariants(bundle.geometry).hasBoundary) throw Error(ErrorKind::NoBoundary, "boundary suite needs a boundary");
  if (!is_disk2(bundle) || bundle.field() != 0.0)
    throw Error(ErrorKind::Capability, "boundary suite runs on the untwisted 2-disk");
  std::mt19937_64 rng = instance_rng(opts.seed, 11);
  const double R = bundle.geometry.len(bundle.geometry.radius);
  const PlaneWaveSpinor s = random_plane_spinor(6, 3.0 / R, rng);
  const PlaneWaveScalar phi = random_plane_scalar(4, 2.0 / R, 0.3, rng);
  const double tau = uniform(rng, -1, 1), delta = uniform(rng, -1, 1);

  struct Case {
    std::string variant;
    BoundaryCondition bc;
    std::string label;
  };
  const std::vector<Case> cases{
      {"b1", BoundaryCondition::mit(+1), "b1/mit+"},     {"b1", BoundaryCondition::mit(-1), "b1/mit-"},
      {"b1", BoundaryCondition::local(+1), "b1/local+"}, {"b1", BoundaryCondition::local(-1), "b1/local-"},
      {"b2", BoundaryCondition::mit(+1), "b2/mit+"},     {"b2", BoundaryCondition::local(+1), "b2/local+"},
      {"DD", BoundaryCondition::none(), "DD"},           {"D", BoundaryCondition::none(), "D"},
  };
  for (const auto& c : cases) {
    IdentityReport r = boundary_identity_series(bundle, c.bc, s, phi, tau, delta, c.variant);
    r.identity = c.label;
    bool exact = true;
    for (const auto& [h, res] : r.resolutionSeries) exact = exact && res <= 1e-12 * r.scale;
    const bool pass = exact || (r.order && *r.order >= 1.0);
    out.push_back(judged(std::move(r), pass, "fitted order >= 1 or exact to rounding", "refinement study"));
  }
  for (double b : {-1.0, -0.25, 0.5, 1.5})
    for (int sign : {+1, -1}) {
      IdentityReport worst;
      double worstRes = -1.0;
      for (int i = 0; i < 50; ++i) {
        IdentityReport r = check_boundary_identity(bundle, BoundaryCondition::maps(b / R, sign), s, phi, tau, delta,
                                                   "maps", 128, &rng);
        if (r.residual > worstRes) {
          worstRes = r.residual;
          worst = r;
        }
      }
      std::ostringstream id;
      id << "maps b=" << b / R << (sign > 0 ? " +" : " -");
      worst.identity = id.str();
      worst.note += "; worst of 50 random sections";
      const bool pass = worst.residual <= kIdentityTol;
      out.push_back(judged(std::move(worst), pass, "pairing defect <= 1e-10 |t|^2", "exact identity"));
    }
  weighted_suite(bundle, opts, std::min(opts.instances, 20), out);
}

void scaling_suite(const SuiteOptions& opts, std::vector<CheckResult>& out) {
  const double sigma = opts.sigma;
  struct Case {
    std::string label;
    DiracBundleSpec bundle;
    BoundaryCondition bc;
    int resolution;
  };
  const std::vector<Case> cases{
      {"torus spin(1,1)", {make_torus(1.0, 1.0, {1, 1}), 0.0}, BoundaryCondition::none(), 16},
      {"torus B=2pi", {make_torus(1.0, 1.0), 2 * M_PI}, BoundaryCondition::none(), 16},
      {"disk local", {make_disk(1.0), 0.0}, BoundaryCondition::local(+1), 256},
      {"disk mit", {make_disk(1.0), 0.0}, BoundaryCondition::mit(+1), 256},
      {"sphere", {make_sphere(2, 1.0), 0.0}, BoundaryCondition::none(), 256},
  };
  for (const auto& c : cases) {
    IdentityReport r = check_scaling(c.bundle, c.bc, sigma, 4, c.resolution);
    r.identity = "scaling/" + c.label;
    out.push_back(relative_check(std::move(r), 1e-8, "homothety law"));
  }
  struct BoundCase {
    std::string label;
    DiracBundleSpec bundle;
    BoundOptions opts;
  };
  auto bopts = [](Theorem t, BoundaryCondition bc) {
    BoundOptions o;
    o.theorem = t;
    o.bc = bc;
    return o;
  };
  const std::vector<BoundCase> bounds{
      {"t1 disk", {make_disk(1.0), 0.0}, bopts(Theorem::T1, BoundaryCondition::local(+1))},
      {"t1 sphere", {make_sphere(2, 1.0), 0.0}, bopts(Theorem::T1, BoundaryCondition::none())},
      {"aps disk b=0", {make_disk(1.0), 0.0}, bopts(Theorem::ThmAPS, BoundaryCondition::aps(0.0))},
      {"aps disk b=0.25", {make_disk(1.0), 0.0}, bopts(Theorem::ThmAPS, BoundaryCondition::aps(0.25))},
      {"maps disk b=-1", {make_disk(1.0), 0.0}, bopts(Theorem::ThmModAPS, BoundaryCondition::maps(-1.0, 1))},
      {"thm2 S3", {make_sphere(3, 1.0), 0.0}, bopts(Theorem::Thm2, BoundaryCondition::none())},
      {"volaps ball", {make_disk(1.0, 3), 0.0}, bopts(Theorem::VolAPS, BoundaryCondition::aps(-0.5))},
  };
  for (const auto& c : bounds) {
    BoundOptions scaled = c.opts;
    scaled.bc.b = c.opts.bc.b / sigma;
    scaled.gamma = 0.0;
    BoundOptions base = c.opts;
    base.gamma = 0.0;
    const double r0 = bound_rhs(c.bundle, base);
    const double r1 = bound_rhs(rescale(c.bundle, sigma), scaled);
    IdentityReport r;
    r.identity = "bound-scaling/" + c.label;
    r.lhs = r1 * sigma * sigma;
    r.rhs = r0;
    r.residual = std::abs(r.lhs - r.rhs) / std::max(std::abs(r0), 1e-300);
    if (r0 == 0.0) r.residual = std::abs(r.lhs);
    r.scale = 1.0;
    r.note = "relative deviation of sigma^2 * rhs(rescaled) from rhs";
    out.push_back(relative_check(std::move(r), 1e-8, "homothety law"));
  }
}

}  // namespace

BoundaryCondition theorem_condition(const DiracBundleSpec& bundle, const BoundOptions& opts) {
  if (!invariants(bundle.geometry).hasBoundary) return BoundaryCondition::none();
  switch (opts.theorem) {
    case Theorem::T1:
    case Theorem::Thm2:
      if (opts.bc.kind == BCKind::None)
        throw Error(ErrorKind::Argument, "this theorem needs the MIT or the local condition on a boundary");
      return opts.bc;
    case Theorem::ThmAPS:
    case Theorem::VolAPS: return BoundaryCondition::aps(opts.bc.b);
    case Theorem::ThmModAPS:
    case Theorem::VolModAPS: return BoundaryCondition::maps(opts.bc.b, opts.bc.sign);
  }
  return opts.bc;
}

double bound_rhs(const DiracBundleSpec& bundle, const BoundOptions& opts) {
  const double b = opts.bc.b;
  switch (opts.theorem) {
    case Theorem::T1: return bound_t1(bundle);
    case Theorem::Thm2: return bound_thm2(bundle, opts.resolution);
    case Theorem::ThmAPS: return bound_aps(bundle, b, opts.resolution);
    case Theorem::ThmModAPS: return bound_maps(bundle, b, opts.resolution);
    case Theorem::VolAPS:
    case Theorem::VolModAPS:
      return bound_volume(bundle, b, opts.gamma.value_or(0.0), opts.theorem == Theorem::VolModAPS).rhs;
  }
  return NAN;
}

BoundReport evaluate_bound(const DiracBundleSpec& bundle, const BoundOptions& opts) {
  validate(bundle);
  const int n = bundle.dim();
  if ((opts.theorem == Theorem::T1) && n != 2) throw Error(ErrorKind::Dimension, "Theorem T1 is stated for n = 2");
  if ((opts.theorem == Theorem::Thm2 || opts.theorem == Theorem::VolAPS || opts.theorem == Theorem::VolModAPS) && n < 3)
    throw Error(ErrorKind::Dimension, "this theorem needs n >= 3");
  const BoundaryCondition bc = theorem_condition(bundle, opts);

  SpectrumOptions so;
  so.bc = bc;
  so.k = 1;
  so.resolution = opts.resolution;
  so.modes = opts.modes;
  so.tol = opts.tol;
  so.method = opts.method;
  so.wantGround = true;
  const SpectrumResult spec = compute_spectrum(bundle, so);
  const double lhs = std::norm(spec.values.front().value);

  BoundReport rep;
  std::ostringstream hyp;
  hyp.precision(10);
  if (opts.theorem == Theorem::VolAPS || opts.theorem == Theorem::VolModAPS) {
    const double gamma = opts.gamma ? *opts.gamma : gamma_estimate(bundle.geometry, opts.resolution);
    rep = bound_volume(bundle, opts.bc.b, gamma, opts.theorem == Theorem::VolModAPS, lhs);
    hyp << rep.hypotheses << "; gamma=" << gamma << (opts.gamma ? " (given)" : " (discrete estimate)");
  } else {
    rep.theorem = opts.theorem;
    rep.lhs = lhs;
    rep.rhs = bound_rhs(bundle, opts);
    rep.hypothesesOk = true;
    if (opts.theorem == Theorem::T1 || opts.theorem == Theorem::Thm2) {
      const bool ok = bc.kind == BCKind::None || bc.kind == BCKind::MITBag || bc.kind == BCKind::LocalChirality;
      rep.hypothesesOk = ok;
      hyp << "condition " << bc.describe() << (ok ? "" : " is outside the theorem's hypotheses");
    } else {
      hyp << "condition " << bc.describe();
    }
  }
  rep.hypotheses = hyp.str();

  // tolerance: solver tolerance plus a second-order estimate of the discretization error from a
  // companion run at half resolution (or double resolution on grids too coarse to halve)
  double tol = 10.0 * opts.tol * std::max(1.0, lhs);
  const bool staggered = has_mode_reduction(bundle.geometry) && spec.values.front().method == "staggered";
  if (opts.estimateError) {
    const bool coarse = opts.resolution < 16;
    BoundOptions other = opts;
    other.resolution = coarse ? 2 * opts.resolution : opts.resolution / 2;
    const double factor = coarse ? 4.0 / 3.0 : 1.0 / 3.0;
    if (staggered) {
      SpectrumOptions sh = so;
      sh.resolution = other.resolution;
      sh.wantGround = false;
      tol += factor * std::abs(std::norm(compute_spectrum(bundle, sh).values.front().value) - lhs);
    }
    if (opts.theorem == Theorem::Thm2 || opts.theorem == Theorem::ThmAPS || opts.theorem == Theorem::ThmModAPS)
      tol += factor * std::abs(bound_rhs(bundle, other) - rep.rhs);
  }
  rep.tolerance = tol;
  rep.gap = rep.lhs - rep.rhs;
  if (spec.groundOp && spec.ground) rep.equality = equality_diagnostics(bundle, *spec.groundOp, *spec.ground);
  return rep;
}

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
  const std::string& s = opts.suite;
  if (s != "identities" && s != "boundary" && s != "scaling" && s != "all")
    throw Error(ErrorKind::Config, "unknown suite '" + s + "'");
  if (opts.instances < 1) throw Error(ErrorKind::Parameter, "instance count must be positive");
  if (!(opts.sigma > 0.0)) throw Error(ErrorKind::Parameter, "sigma must be positive");
  std::vector<CheckResult> out;
  const DiracBundleSpec torus{make_torus(1.0, 1.0, {1, 0}), 0.0};
  const DiracBundleSpec disk{make_disk(1.0), 0.0};
  const bool all = s == "all";
  if (s == "identities" || all) {
    DiracBundleSpec b = torus;
    if (opts.bundle) {
      if (flat_untwisted(*opts.bundle)) b = *opts.bundle;
      else if (!all) throw Error(ErrorKind::Capability, "identity suite runs on the untwisted flat torus or 2-disk");
    }
    identities_suite(opts, b, out);
  }
  if (s == "boundary" || all) {
    DiracBundleSpec b = disk;
    if (opts.bundle) {
      const bool fits = is_disk2(*opts.bundle) && opts.bundle->field() == 0.0;
      if (fits) b = *opts.bundle;
      else if (!all) b = *opts.bundle;  // boundary_suite reports why it does not apply
    }
    boundary_suite(opts, b, out);
  }
  if (s == "scaling" || all) scaling_suite(opts, out);
  return out;
}

ConvergenceStudy run_convergence(const DiracBundleSpec& bundle, const BoundaryCondition& bc,
                                 const std::string& quantity, int baseResolution, int levels, int modes,
                                 std::uint64_t seed) {
  if (levels < 3) throw Error(ErrorKind::Parameter, "a convergence study needs at least 3 levels");
  if (baseResolution < 8) throw Error(ErrorKind::Resolution, "base resolution must be at least 8");
  ConvergenceStudy st;
  st.quantity = quantity;
  std::vector<int> resolutions;
  for (int i = 0; i < levels; ++i) resolutions.push_back(baseResolution << i);
  st.points.resize(levels);
  if (quantity == "lambda") {
    parallel_for(levels, [&](std::size_t i) {
      SpectrumOptions so;
      so.bc = bc;
      so.k = 1;
      so.resolution = resolutions[i];
      so.modes = modes;
      st.points[i].value = std::abs(compute_spectrum(bundle, so).values.front().value);
    });
    for (int i = 0; i < levels; ++i) {
      st.points[i].resolution = resolutions[i];
      st.points[i].h = 1.0 / resolutions[i];
      st.points[i].residual = i + 1 < levels ? std::abs(st.points[i].value - st.points[i + 1].value) : NAN;
    }
  } else if (quantity == "bochner" || quantity == "b1" || quantity == "DD" || quantity == "D") {
    std::mt19937_64 rng = instance_rng(seed, 11);
    const PlaneWaveSpinor s = random_plane_spinor(6, 3.0, rng);
    const PlaneWaveScalar phi = random_plane_scalar(4, 2.0, 0.3, rng);
    const BoundaryCondition pbc = bc.kind == BCKind::None ? BoundaryCondition::mit(+1) : bc;
    for (int i = 0; i < levels; ++i) {
      const int res = resolutions[i];
      const IdentityReport r = quantity == "bochner"
                                   ? check_bochner(bundle, res)
                                   : check_boundary_identity(bundle, pbc, s, phi, 0.6, -0.3, quantity, res);
      st.points[i] = {res, 1.0 / res, r.residual, r.residual};
    }
  } else {
    throw Error(ErrorKind::Config, "unknown convergence quantity '" + quantity + "'");
  }
  std::vector<std::pair<double, double>> series;
  for (const auto& p : st.points)
    if (std::isfinite(p.residual)) series.push_back({p.h, p.residual});
  st.order = fitted_order(series, 1e-14 * std::max(1.0, std::abs(st.points.front().value)));
  return st;
}

}  // namespace db
