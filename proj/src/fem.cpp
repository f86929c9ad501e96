#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "diracbound/bounds.hpp"
#include "diracbound/eigensolve.hpp"
#include "diracbound/errors.hpp"

namespace db {

namespace {

// P1 elements on the reduced domain with density-weighted 3-point Gauss quadrature.
struct P1System {
  std::vector<double> nodes;
  Eigen::MatrixXd K, M, Bnd;  // stiffness, mass, boundary mass (coefficient per component)
  Eigen::VectorXd load;       // integral of each hat function
  bool periodic = false;
  int unknowns = 0;
};

int dof(const P1System& s, int node) { return s.periodic && node == static_cast<int>(s.nodes.size()) - 1 ? 0 : node; }

P1System assemble_p1(const GeometrySpec& g, int resolution,
                     const std::function<double(const BoundaryComponent&)>& boundaryCoeff) {
  if (resolution < 8) throw Error(ErrorKind::Resolution, "resolution must be at least 8");
  const ReducedDomain d = reduced_domain(g);
  P1System s;
  s.periodic = d.left == EndKind::Periodic;
  const int N = resolution;
  for (int i = 0; i <= N; ++i) s.nodes.push_back(d.a + (d.b - d.a) * i / N);
  s.unknowns = s.periodic ? N : N + 1;
  s.K = Eigen::MatrixXd::Zero(s.unknowns, s.unknowns);
  s.M = Eigen::MatrixXd::Zero(s.unknowns, s.unknowns);
  s.Bnd = Eigen::MatrixXd::Zero(s.unknowns, s.unknowns);
  s.load = Eigen::VectorXd::Zero(s.unknowns);
  const GaussRule gr = gauss_legendre(3);
  for (int e = 0; e < N; ++e) {
    const double x0 = s.nodes[e], x1 = s.nodes[e + 1], h = x1 - x0;
    const int i0 = dof(s, e), i1 = dof(s, e + 1);
    for (std::size_t q = 0; q < gr.x.size(); ++q) {
      const double t = 0.5 * (gr.x[q] + 1.0), wq = 0.5 * gr.w[q] * h;
      const double rho = d.density(x0 + t * h);
      const double phi[2] = {1.0 - t, t}, dphi[2] = {-1.0 / h, 1.0 / h};
      const int idx[2] = {i0, i1};
      for (int a = 0; a < 2; ++a) {
        s.load[idx[a]] += wq * rho * phi[a];
        for (int b = 0; b < 2; ++b) {
          s.K(idx[a], idx[b]) += wq * rho * dphi[a] * dphi[b];
          s.M(idx[a], idx[b]) += wq * rho * phi[a] * phi[b];
        }
      }
    }
  }
  const GeometricInvariants inv = invariants(g);
  for (const auto& c : inv.boundary) {
    const int node = std::abs(c.position - d.a) <= std::abs(c.position - d.b) ? 0 : N;
    const double beta = boundaryCoeff ? boundaryCoeff(c) : 1.0;
    s.Bnd(dof(s, node), dof(s, node)) += beta * c.area;
  }
  return s;
}

RobinResult expand(const P1System& s, const Eigen::VectorXd& u, double value) {
  RobinResult r;
  r.value = value;
  r.nodes = s.nodes;
  r.minimizer.resize(s.nodes.size());
  for (std::size_t i = 0; i < s.nodes.size(); ++i) r.minimizer[i] = u[dof(s, static_cast<int>(i))];
  const double nrm = std::sqrt(u.dot(s.M * u));
  r.minimizer /= nrm;
  if (r.minimizer.sum() < 0) r.minimizer = -r.minimizer;
  return r;
}

}  // namespace

RobinResult robin_min(const GeometrySpec& g, double gradCoeff, double zeroOrder,
                      const std::function<double(const BoundaryComponent&)>& boundaryCoeff, int resolution) {
  validate(g);
  if (!(gradCoeff > 0.0)) throw Error(ErrorKind::Parameter, "gradient coefficient must be positive");
  const P1System s = assemble_p1(g, resolution, boundaryCoeff);
  const Eigen::MatrixXd A = gradCoeff * s.K + zeroOrder * s.M + s.Bnd;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, s.M);
  if (es.info() != Eigen::Success) throw ConvergenceError("Robin pencil eigensolve failed", INFINITY);
  return expand(s, es.eigenvectors().col(0), es.eigenvalues()[0]);
}

double robin_rayleigh_from(const GeometrySpec& g, double gradCoeff, double zeroOrder,
                           const std::function<double(const BoundaryComponent&)>& boundaryCoeff, int resolution,
                           const Eigen::VectorXd& start) {
  const P1System s = assemble_p1(g, resolution, boundaryCoeff);
  const Eigen::MatrixXd A = gradCoeff * s.K + zeroOrder * s.M + s.Bnd;
  Eigen::VectorXd v(s.unknowns);
  if (start.size() != static_cast<Eigen::Index>(s.nodes.size())) throw Error(ErrorKind::Shape, "start vector size");
  for (int i = 0; i < s.unknowns; ++i) v[i] = start[i];
  auto rayleigh = [&](const Eigen::VectorXd& x) { return x.dot(A * x) / x.dot(s.M * x); };
  double rq = rayleigh(v);
  double shift = std::abs(rq) + 1.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  for (int attempt = 0; attempt < 60; ++attempt) {
    ldlt.compute(A + shift * s.M);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0).all()) break;
    shift *= 2.0;
  }
  for (int it = 0; it < 500; ++it) {
    v = ldlt.solve(s.M * v);
    v /= std::sqrt(v.dot(s.M * v));
    const double next = rayleigh(v);
    if (std::abs(next - rq) <= 1e-15 * std::max(1.0, std::abs(next))) {
      rq = next;
      break;
    }
    rq = next;
  }
  return rq;
}

double gamma_estimate(const GeometrySpec& g, int resolution) {
  validate(g);
  if (g.n < 3) throw Error(ErrorKind::Dimension, "gamma is defined for n >= 3");
  const P1System s = assemble_p1(g, resolution, nullptr);
  const double vol = invariants(g).volume;
  const Eigen::MatrixXd A = std::pow(vol, -2.0 / g.n) * s.M - sobolev_constant(g.n) * s.K;
  const Eigen::MatrixXd B = s.M + s.Bnd;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("gamma pencil eigensolve failed", INFINITY);
  return es.eigenvalues()[s.unknowns - 1];
}

NeumannWeight solve_neumann_weight(const DiracBundleSpec& bundle, int resolution) {
  validate(bundle);
  const GeometrySpec& g = bundle.geometry;
  if (g.n != 2) throw Error(ErrorKind::Dimension, "the Neumann weight problem is posed for n = 2");
  const double kappa = curvature_kappa(bundle);
  P1System s = assemble_p1(g, resolution, [](const BoundaryComponent& c) { return c.meanCurvature; });
  // boundary load: int_boundary H psi
  Eigen::VectorXd bload = s.Bnd.diagonal();
  const double volume = s.load.sum();
  const double c = (kappa * volume + 0.5 * bload.sum()) / volume;
  const Eigen::VectorXd rhs = 2.0 * ((kappa - c) * s.load + 0.5 * bload);
  // conjugate gradients on the mean-zero subspace of K phi = rhs
  auto project = [&](Eigen::VectorXd v) {
    v.array() -= s.load.dot(v) / volume;
    return v;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(s.unknowns);
  Eigen::VectorXd r = rhs - s.K * x;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const double target = 1e-13 * std::max(1.0, rhs.norm());
  int it = 0;
  for (; it < 20 * s.unknowns && std::sqrt(rr) > target; ++it) {
    const Eigen::VectorXd Kp = s.K * p;
    const double alpha = rr / p.dot(Kp);
    x += alpha * p;
    r -= alpha * Kp;
    const double rr2 = r.squaredNorm();
    p = r + (rr2 / rr) * p;
    rr = rr2;
  }
  const double residual = (s.K * x - rhs).norm();
  if (residual > 1e-9 * std::max(1.0, rhs.norm()))
    throw ConvergenceError("Neumann weight CG did not converge", residual);
  x = project(x);
  NeumannWeight out;
  out.nodes = s.nodes;
  out.values.resize(s.nodes.size());
  for (std::size_t i = 0; i < s.nodes.size(); ++i) out.values[i] = x[dof(s, static_cast<int>(i))];
  out.constant = c;
  out.residual = residual;
  out.iterations = it;
  return out;
}

}  // namespace db
