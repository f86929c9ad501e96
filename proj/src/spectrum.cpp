#include "diracbound/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "diracbound/errors.hpp"
#include "diracbound/parallel.hpp"

namespace db {

namespace {

struct ModeOutcome {
  std::vector<SpectralValue> values;
  std::optional<std::string> note;
};

double characteristic_length(const GeometrySpec& g) {
  switch (g.kind) {
    case GeometryKind::RoundSphere:
    case GeometryKind::UnitDisk: return g.len(g.radius);
    case GeometryKind::Annulus: return g.len(g.rho_out);
    case GeometryKind::Cylinder: return g.len(std::max(g.length, g.circumference));
    case GeometryKind::FlatTorus2: return g.len(std::max(g.L1, g.L2));
  }
  return 1.0;
}

SpectralValue tag(const ModeProblem& p, const DiracBundleSpec& bundle, double label, cplx v, double res,
                  const std::string& method) {
  (void)bundle;
  SpectralValue s;
  s.value = v;
  s.mode = label;
  s.parity = p.parity;
  s.multiplicity = p.mode.multiplicity;
  s.residual = res;
  s.method = method;
  return s;
}

std::vector<double> mode_labels(const DiracBundleSpec& bundle, int modes) {
  std::vector<double> out;
  for (int sign : {+1, -1})
    for (int i = 0; i < modes; ++i) out.push_back(mode_label(bundle, i, sign));
  return out;
}

}  // namespace

SpectrumMethod parse_method(const std::string& s) {
  if (s == "auto") return SpectrumMethod::Auto;
  if (s == "staggered") return SpectrumMethod::Staggered;
  if (s == "shooting") return SpectrumMethod::Shooting;
  throw Error(ErrorKind::Config, "unknown method '" + s + "'");
}

std::vector<cplx> mode_roots(const ModeProblem& problem, double radius, bool realAxis, int steps) {
  ShootingProblem sp;
  sp.problem = problem;
  sp.steps = steps;
  // slightly asymmetric rectangle keeps symmetric root pairs off the contour
  const double R = radius * 1.0013;
  sp.lower = cplx(-R * 1.0007, realAxis ? -0.0371 * radius : -R * 0.9991);
  sp.upper = cplx(R, realAxis ? 0.0313 * radius : R * 1.0011);
  std::vector<cplx> roots = nonnormal_mode_roots(sp, 0);
  std::vector<cplx> out;
  for (cplx z : roots)
    if (std::abs(z) <= radius) out.push_back(realAxis ? cplx(z.real(), 0.0) : z);
  return out;
}

SpectrumResult compute_spectrum(const DiracBundleSpec& bundle, const SpectrumOptions& opts) {
  validate(bundle);
  validate(opts.bc);
  if (opts.k < 1) throw Error(ErrorKind::Parameter, "k must be positive");
  const GeometrySpec& g = bundle.geometry;
  const auto inv = invariants(g);
  const bool hasBC = opts.bc.kind != BCKind::None;
  if (!inv.hasBoundary && hasBC) throw Error(ErrorKind::NoBoundary, "boundary condition given for a closed geometry");
  if (inv.hasBoundary && !hasBC) throw Error(ErrorKind::Argument, "geometry with boundary needs a boundary condition");
  SpectrumResult out;

  if (!has_mode_reduction(g)) {
    const OperatorMatrix op = assemble_dirac(bundle, opts.resolution);
    const EigenResult r = hermitian_eigs(op, std::min<int>(opts.k, static_cast<int>(op.size())), opts.tol, opts.wantGround);
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
      out.values.push_back({r.eigenvalues[i], std::nullopt, 0, 1, r.residuals[i], r.method});
    if (opts.wantGround) {
      out.groundOp = op;
      EigenResult gr;
      gr.method = r.method;
      gr.eigenvalues = {r.eigenvalues[0]};
      gr.residuals = {r.residuals[0]};
      gr.vectors = {r.vectors[0]};
      out.ground = gr;
    }
    out.clusterSizes = r.clusterSizes;
    return out;
  }

  const bool real = opts.bc.realSpectrum();
  SpectrumMethod method = opts.method;
  if (method == SpectrumMethod::Auto) method = real ? SpectrumMethod::Staggered : SpectrumMethod::Shooting;
  if (method == SpectrumMethod::Staggered && !real)
    throw Error(ErrorKind::Argument, "complex spectra are computed by shooting only");
  if (opts.modes < 1) throw Error(ErrorKind::Parameter, "mode count must be positive");

  std::vector<ModeProblem> problems = mode_problems(bundle, opts.bc, opts.modes);
  std::vector<double> labels;
  {
    const auto base = mode_labels(bundle, opts.modes);
    const bool sphere = g.kind == GeometryKind::RoundSphere;
    for (double l : base) {
      labels.push_back(l);
      if (sphere) labels.push_back(l);
    }
  }
  std::vector<ModeOutcome> outcomes(problems.size());

  auto unconstrained = [&](std::size_t i) {
    const ModeProblem& p = problems[i];
    const auto st = p.status();
    if (st == ModeProblem::Status::NoEigenvalues) {
      outcomes[i].note = "mode " + std::to_string(labels[i]) + ": no admissible eigenvalue";
      return true;
    }
    if (st == ModeProblem::Status::AllLambda) {
      // the condition leaves a two-dimensional boundary space: every lambda is admissible and
      // the regular solution at lambda = 0 realizes the smallest modulus
      outcomes[i].note = "mode " + std::to_string(labels[i]) + ": every lambda admissible";
      outcomes[i].values.push_back(tag(p, bundle, labels[i], 0.0, 0.0, "unconstrained-mode"));
      return true;
    }
    return false;
  };

  if (method == SpectrumMethod::Staggered) {
    parallel_for(problems.size(), [&](std::size_t i) {
      if (unconstrained(i)) return;
      const OperatorMatrix op = assemble_mode_dirac(problems[i], opts.resolution);
      const int k = std::min<int>(opts.k, static_cast<int>(op.size()));
      const EigenResult r = hermitian_eigs(op, k, opts.tol);
      for (std::size_t j = 0; j < r.eigenvalues.size(); ++j)
        outcomes[i].values.push_back(tag(problems[i], bundle, labels[i], r.eigenvalues[j], r.residuals[j], "staggered"));
    });
  } else {
    double radius = 4.0 / characteristic_length(g);
    for (int round = 0; round < 12; ++round) {
      parallel_for(problems.size(), [&](std::size_t i) {
        outcomes[i] = ModeOutcome{};
        if (unconstrained(i)) return;
        for (cplx z : mode_roots(problems[i], radius, real))
          outcomes[i].values.push_back(tag(problems[i], bundle, labels[i], z, 0.0, "shooting"));
      });
      std::size_t found = 0;
      for (const auto& o : outcomes) found += o.values.size();
      if (found >= static_cast<std::size_t>(opts.k)) break;
      radius *= 1.6;
    }
  }

  for (const auto& o : outcomes) {
    if (o.note) out.notes.push_back(*o.note);
    out.values.insert(out.values.end(), o.values.begin(), o.values.end());
  }
  std::stable_sort(out.values.begin(), out.values.end(),
                   [](const SpectralValue& a, const SpectralValue& b) { return eigen_order(a.value, b.value); });
  if (static_cast<int>(out.values.size()) > opts.k) out.values.resize(opts.k);
  if (out.values.empty()) throw ConvergenceError("no eigenvalues found in the searched modes", INFINITY);
  // warn when the outermost labels reach into the reported values
  const double outer = std::abs(mode_label(bundle, opts.modes - 1, +1));
  for (const auto& v : out.values)
    if (v.mode && std::abs(*v.mode) >= outer && opts.modes > 1) {
      out.notes.push_back("outermost mode contributes to the reported values; increase the mode count to confirm");
      break;
    }
  std::vector<cplx> vals;
  for (const auto& v : out.values) vals.push_back(v.value);
  out.clusterSizes = cluster_sizes(vals);

  if (opts.wantGround) {
    const SpectralValue& g0 = out.values.front();
    const ModeProblem p = mode_problem(bundle, opts.bc, *g0.mode, g0.parity == 0 ? 1 : g0.parity);
    if (p.status() == ModeProblem::Status::Regular && p.hermitian()) {
      OperatorMatrix op = assemble_mode_dirac(p, opts.resolution);
      const EigenResult all = dense_hermitian_all(op.entries);
      std::size_t best = 0;
      for (std::size_t j = 1; j < all.eigenvalues.size(); ++j)
        if (std::abs(all.eigenvalues[j] - g0.value) < std::abs(all.eigenvalues[best] - g0.value)) best = j;
      EigenResult gr;
      gr.method = "staggered";
      gr.eigenvalues = {all.eigenvalues[best]};
      gr.residuals = {all.residuals[best]};
      gr.vectors = {all.vectors[best]};
      out.groundOp = std::move(op);
      out.ground = gr;
    }
  }
  return out;
}

}  // namespace db
