#include "commands.hpp"

#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "diracbound/errors.hpp"
#include "diracbound/experiments.hpp"
#include "report.hpp"

namespace dbtool {

using nlohmann::ordered_json;

namespace {

ordered_json optional_num(const std::optional<double>& x) { return x ? ordered_json(num(*x)) : ordered_json(nullptr); }

ordered_json report_json(const db::IdentityReport& r) {
  ordered_json j;
  j["identity"] = r.identity;
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["residual"] = num(r.residual);
  j["scale"] = num(r.scale);
  j["order"] = optional_num(r.order);
  ordered_json series = ordered_json::array();
  for (const auto& [h, res] : r.resolutionSeries) series.push_back({{"h", num(h)}, {"residual", num(res)}});
  j["resolutionSeries"] = series;
  j["note"] = r.note;
  return j;
}

const char* rhs_provenance(db::Theorem t) {
  switch (t) {
    case db::Theorem::T1:
    case db::Theorem::VolAPS:
    case db::Theorem::VolModAPS: return "closed form";
    default: return "scalar minimization";
  }
}

}  // namespace

int cmd_spectrum(const RunConfig& cfg) {
  const db::DiracBundleSpec bundle = make_bundle(cfg);
  db::SpectrumOptions so;
  so.bc = make_bc(cfg);
  so.k = cfg.k;
  so.resolution = effective_resolution(cfg);
  so.modes = cfg.modes;
  so.tol = cfg.tol;
  so.method = db::parse_method(cfg.method);
  const db::SpectrumResult res = db::compute_spectrum(bundle, so);
  Report rep;
  rep.kind = "spectrum";
  rep.tolerance = cfg.tol;
  rep.notes = res.notes;
  rep.csvHeader = {"index", "re", "im", "abs", "mode", "parity", "multiplicity", "residual", "method"};
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    const auto& v = res.values[i];
    ordered_json j;
    j["index"] = i;
    j["re"] = num(v.value.real());
    j["im"] = num(v.value.imag());
    j["abs"] = num(std::abs(v.value));
    j["mode"] = optional_num(v.mode);
    j["parity"] = v.parity;
    j["multiplicity"] = v.multiplicity;
    j["residual"] = num(v.residual);
    j["method"] = v.method;
    j["provenance"] = "computed";
    rep.results.push_back(j);
    rep.csvRows.push_back({std::to_string(i), num(v.value.real()), num(v.value.imag()), num(std::abs(v.value)),
                           v.mode ? num(*v.mode) : "", std::to_string(v.parity), std::to_string(v.multiplicity),
                           num(v.residual), v.method});
  }
  std::string clusters;
  for (int c : res.clusterSizes) clusters += (clusters.empty() ? "" : ",") + std::to_string(c);
  rep.notes.push_back("cluster sizes: " + clusters);
  write_report(rep, cfg);
  return kExitOk;
}

int cmd_bound(const RunConfig& cfg) {
  const db::DiracBundleSpec bundle = make_bundle(cfg);
  db::BoundOptions bo;
  bo.theorem = db::parse_theorem(cfg.theorem);
  bo.bc = make_bc(cfg);
  bo.resolution = effective_resolution(cfg);
  bo.modes = cfg.modes;
  bo.tol = cfg.tol;
  bo.gamma = cfg.gamma;
  bo.method = db::parse_method(cfg.method);
  const db::BoundReport r = db::evaluate_bound(bundle, bo);
  Report rep;
  rep.kind = "bound";
  rep.tolerance = r.tolerance;
  ordered_json j;
  j["theorem"] = db::theorem_name(r.theorem);
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["gap"] = num(r.gap);
  j["tolerance"] = num(r.tolerance);
  j["hypothesesOk"] = r.hypothesesOk;
  j["hypotheses"] = r.hypotheses;
  j["lhsProvenance"] = "computed spectrum";
  j["rhsProvenance"] = rhs_provenance(r.theorem);
  if (r.equality) {
    ordered_json e;
    e["killingResidual"] = optional_num(r.equality->killingResidual);
    e["curvatureResidual"] = num(r.equality->curvatureResidual);
    e["meanCurvatureMax"] = num(r.equality->meanCurvatureMax);
    e["kappaRelation"] = num(r.equality->kappaRelation);
    j["equality"] = e;
  } else {
    j["equality"] = nullptr;
  }
  rep.results.push_back(j);
  rep.csvHeader = {"theorem", "lhs", "rhs", "gap", "tolerance", "hypothesesOk", "killingResidual"};
  rep.csvRows.push_back({db::theorem_name(r.theorem), num(r.lhs), num(r.rhs), num(r.gap), num(r.tolerance),
                         r.hypothesesOk ? "true" : "false",
                         r.equality && r.equality->killingResidual ? num(*r.equality->killingResidual) : ""});
  write_report(rep, cfg);
  if (r.hypothesesOk && r.gap < -r.tolerance) {
    std::cerr << "bound violated: gap " << num(r.gap) << " below -" << num(r.tolerance) << "\n";
    return kExitVerificationFailed;
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  db::SuiteOptions so;
  so.suite = cfg.suite;
  so.seed = cfg.seed;
  so.instances = cfg.instances;
  so.sigma = cfg.sigma;
  if (cfg.geometryGiven) so.bundle = make_bundle(cfg);
  const std::vector<db::CheckResult> checks = db::run_suite(so);
  Report rep;
  rep.kind = "verify";
  rep.tolerance = 1e-10;
  rep.csvHeader = {"identity", "lhs", "rhs", "residual", "scale", "order", "criterion", "pass"};
  int failures = 0;
  for (const auto& c : checks) {
    ordered_json j = report_json(c.report);
    j["criterion"] = c.criterion;
    j["provenance"] = c.provenance;
    j["pass"] = c.pass;
    rep.results.push_back(j);
    rep.csvRows.push_back({c.report.identity, num(c.report.lhs), num(c.report.rhs), num(c.report.residual),
                           num(c.report.scale), c.report.order ? num(*c.report.order) : "", c.criterion,
                           c.pass ? "true" : "false"});
    if (!c.pass) {
      ++failures;
      std::cerr << "FAILED " << c.report.identity << ": residual " << num(c.report.residual) << " (" << c.criterion
                << ")\n";
    }
  }
  write_report(rep, cfg);
  return failures ? kExitVerificationFailed : kExitOk;
}

int cmd_converge(const RunConfig& cfg) {
  if (cfg.refinements < 3) throw db::Error(db::ErrorKind::Parameter, "refinements must be at least 3");
  const db::DiracBundleSpec bundle = make_bundle(cfg);
  const int base = cfg.resolution ? *cfg.resolution : (cfg.geometry == "torus" ? 8 : 64);
  const db::ConvergenceStudy st =
      db::run_convergence(bundle, make_bc(cfg), cfg.quantity, base, cfg.refinements, cfg.modes, cfg.seed);
  Report rep;
  rep.kind = "converge";
  rep.tolerance = cfg.tol;
  rep.csvHeader = {"resolution", "h", "value", "residual"};
  ordered_json pts = ordered_json::array();
  for (const auto& p : st.points) {
    pts.push_back({{"resolution", p.resolution}, {"h", num(p.h)}, {"value", num(p.value)}, {"residual", num(p.residual)}});
    rep.csvRows.push_back({std::to_string(p.resolution), num(p.h), num(p.value), num(p.residual)});
  }
  ordered_json j;
  j["quantity"] = st.quantity;
  j["points"] = pts;
  j["order"] = optional_num(st.order);
  j["provenance"] = "refinement study";
  rep.results.push_back(j);
  rep.notes.push_back(st.order ? "fitted order " + num(*st.order) : "no fitted order: residuals at rounding level");
  write_report(rep, cfg);
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Dirac operator spectra, eigenvalue lower bounds and identity checks"};
  app.require_subcommand(1);
  std::string configPath;
  struct Flag {
    std::string key;
    std::string value;
    CLI::Option* opt = nullptr;
  };
  std::vector<std::unique_ptr<Flag>> flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", configPath, "configuration file (key = value lines under [section] headers)");
    const std::vector<std::pair<std::string, std::string>> specs{
        {"--geometry", "torus, sphere, disk, ball, annulus, cylinder"},
        {"--L1", "torus side"},
        {"--L2", "torus side"},
        {"--spin", "spin structure, e.g. 1,0"},
        {"--radius", "sphere or disk radius"},
        {"--n", "dimension"},
        {"--rho-in", "annulus inner radius"},
        {"--rho-out", "annulus outer radius"},
        {"--length", "cylinder length"},
        {"--circumference", "cylinder circumference"},
        {"--scale", "homothety factor"},
        {"--twist", "constant line-bundle field B"},
        {"--bc", "none, mit, local, aps, maps"},
        {"--b", "APS threshold b"},
        {"--sign", "sign of the MIT/local/modified APS condition"},
        {"-k,--k", "number of eigenvalues"},
        {"--resolution", "grid or Fourier resolution"},
        {"--modes", "angular modes of each sign"},
        {"--tol", "eigenpair residual tolerance"},
        {"--method", "auto, staggered, shooting"},
        {"--seed", "random seed"},
        {"--out", "output path (default standard output)"},
        {"--format", "json or csv"},
        {"--theorem", "t1, thm2, aps, maps, volaps, volmaps"},
        {"--gamma", "gamma for the volume bounds"},
        {"--suite", "identities, boundary, scaling, all"},
        {"--sigma", "scaling factor"},
        {"--refinements", "number of resolution levels"},
        {"--quantity", "lambda, bochner, b1, DD, D"},
        {"--instances", "random instances per identity"},
    };
    for (const auto& [name, help] : specs) {
      auto f = std::make_unique<Flag>();
      std::string key = name.substr(name.rfind('-') + 1);
      if (key == "in" || key == "out") key = name.find("rho") != std::string::npos ? "rho_" + key : key;
      f->key = key;
      f->opt = sub->add_option(name, f->value, help);
      flags.push_back(std::move(f));
    }
  };
  CLI::App* spectrum = app.add_subcommand("spectrum", "smallest-modulus eigenvalues");
  CLI::App* bound = app.add_subcommand("bound", "eigenvalue lower bound with the computed eigenvalue");
  CLI::App* verify = app.add_subcommand("verify", "identity and scaling suites");
  CLI::App* converge = app.add_subcommand("converge", "refinement study");
  for (CLI::App* s : {spectrum, bound, verify, converge}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    RunConfig cfg;
    if (!configPath.empty()) load_config_file(cfg, configPath);
    for (const auto& f : flags)
      if (f->opt->count() > 0) apply_setting(cfg, f->key, f->value);
    if (spectrum->parsed()) return cmd_spectrum(cfg);
    if (bound->parsed()) return cmd_bound(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    return cmd_converge(cfg);
  } catch (const db::Error& e) {
    std::cerr << e.what() << "\n";
    const bool solver = e.kind() == db::ErrorKind::Convergence || e.kind() == db::ErrorKind::IncompleteSearch;
    return solver ? kExitSolverFailure : kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}

}  // namespace dbtool
