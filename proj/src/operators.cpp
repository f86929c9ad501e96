#include "diracbound/operators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "diracbound/errors.hpp"

namespace db {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

// Dense Fourier blocks are stored in one matrix; this caps its size.
constexpr int kMaxTorusUnknowns = 4096;

void require_resolution(int resolution) {
  if (resolution < 8) throw Error(ErrorKind::Resolution, "resolution must be at least 8");
}

// Raw (nodal) staggered operator before symmetrization.
struct StaggeredGrid {
  int N = 0;
  double a = 0.0, b = 1.0, h = 1.0;
  bool leftNode = false, rightNode = false;
  // Centres hold f2 and nodes hold f1 (used when f1 is the singular component at the left end).
  bool swapped = false;
  std::vector<int> f2nodes;  // node indices i present
  std::vector<double> coords;
  std::vector<int> component;
  Eigen::VectorXd W;

  int f1(int j) const { return j - 1; }  // j = 1..N
  int f2(int i) const {                  // index of node i, or -1 if dropped
    const int first = f2nodes.empty() ? 0 : f2nodes.front();
    const int k = i - first;
    if (k < 0 || k >= static_cast<int>(f2nodes.size())) return -1;
    return N + k;
  }
  int size() const { return N + static_cast<int>(f2nodes.size()); }
  double centre(int j) const { return a + (j - 0.5) * h; }
  double node(int i) const { return a + i * h; }
};

StaggeredGrid make_grid(const RadialMode& m, int N, bool leftNode, bool rightNode, bool swapped) {
  StaggeredGrid g;
  g.swapped = swapped;
  g.N = N;
  g.a = m.a;
  g.b = m.b;
  g.h = (m.b - m.a) / N;
  g.leftNode = leftNode;
  g.rightNode = rightNode;
  for (int i = leftNode ? 0 : 1; i <= (rightNode ? N : N - 1); ++i) g.f2nodes.push_back(i);
  g.W.resize(g.size());
  for (int j = 1; j <= N; ++j) {
    const double c = g.centre(j);
    g.coords.push_back(c);
    g.component.push_back(swapped ? 1 : 0);
    g.W[g.f1(j)] = m.w(c) * g.h;
  }
  for (int i : g.f2nodes) {
    const double r = g.node(i);
    g.coords.push_back(r);
    g.component.push_back(swapped ? 0 : 1);
    double wt = m.w(r) * g.h;
    if (i == 0 || i == N) wt *= 0.5;
    g.W[g.f2(i)] = wt;
  }
  return g;
}

// Nodal Dirac matrix with endpoint relations f1 = cL f2 (left) and f1 = cR f2 (right).
Eigen::MatrixXcd staggered_dirac(const RadialMode& m, const StaggeredGrid& g, cplx cL, cplx cR) {
  const int N = g.N;
  const double h = g.h;
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(g.size(), g.size());
  for (int i = 1; i <= N - 1; ++i) {
    const double r = g.node(i), q = m.q1(r);
    const int row = g.f2(i);
    K(row, g.f1(i)) = -1.0 / h + 0.5 * q;
    K(row, g.f1(i + 1)) = 1.0 / h + 0.5 * q;
    K(g.f1(i), row) = K(row, g.f1(i)) * g.W[row] / g.W[g.f1(i)];
    K(g.f1(i + 1), row) = K(row, g.f1(i + 1)) * g.W[row] / g.W[g.f1(i + 1)];
  }
  if (g.rightNode) {
    const double r = g.node(N), wc = m.w(g.centre(N)), wn = m.w(r), q = m.q1(r);
    const int row = g.f2(N), col = g.f1(N);
    K(col, row) = -wn / (h * wc) + wn * q / (2.0 * wc);
    K(row, col) = K(col, row) * g.W[col] / g.W[row];
    K(row, row) = 2.0 * cR / h;
  }
  if (g.leftNode) {
    const double r = g.node(0), wc = m.w(g.centre(1)), wn = m.w(r), q = m.q1(r);
    const int row = g.f2(0), col = g.f1(1);
    K(col, row) = wn / (h * wc) + wn * q / (2.0 * wc);
    K(row, col) = K(col, row) * g.W[col] / g.W[row];
    K(row, row) = -2.0 * cL / h;
  }
  return K;
}

OperatorMatrix from_nodal(const std::string& what, const StaggeredGrid& g, const Eigen::MatrixXcd& K,
                          Symmetry sym) {
  OperatorMatrix op;
  op.what = what;
  op.layout = Layout::Staggered;
  op.weights = g.W;
  op.coords = g.coords;
  op.component = g.component;
  op.h = g.h;
  const Eigen::VectorXd s = g.W.cwiseSqrt();
  op.entries = s.asDiagonal() * K * s.cwiseInverse().asDiagonal();
  op.symmetry = sym;
  op.resolution = g.N;
  return op;
}

bool is_line(const EndLine& e) { return e.kind == EndLine::Kind::Line; }

double curvature_shift_upper(const DiracBundleSpec& bundle) {
  return invariants(bundle.geometry).scalarCurvature / 4.0 + bundle.field();
}
double curvature_shift_lower(const DiracBundleSpec& bundle) {
  return invariants(bundle.geometry).scalarCurvature / 4.0 - bundle.field();
}

// Landau-level block for one degeneracy copy of the twisted torus.
struct LandauBlocks {
  Eigen::MatrixXd dirac, laplacian, curvature;
};

LandauBlocks landau_block(double B, int M) {
  const double b = std::abs(B);
  const int size = 2 * M + 1;
  LandauBlocks lb;
  lb.dirac = Eigen::MatrixXd::Zero(size, size);
  lb.laplacian = Eigen::MatrixXd::Zero(size, size);
  lb.curvature = Eigen::MatrixXd::Zero(size, size);
  const double amp = -std::sqrt(2.0 * b);
  if (B > 0) {
    // upper levels 0..M-1 at [0,M), lower levels 0..M at [M, 2M+1)
    for (int k = 1; k <= M; ++k) {
      lb.dirac(k - 1, M + k) = amp * std::sqrt(static_cast<double>(k));
      lb.dirac(M + k, k - 1) = lb.dirac(k - 1, M + k);
    }
    for (int k = 0; k < M; ++k) {
      lb.laplacian(k, k) = b * (2 * k + 1);
      lb.curvature(k, k) = b;
    }
    for (int k = 0; k <= M; ++k) {
      lb.laplacian(M + k, M + k) = b * (2 * k + 1);
      lb.curvature(M + k, M + k) = -b;
    }
  } else {
    // upper levels 0..M at [0, M+1), lower levels 0..M-1 at [M+1, 2M+1)
    for (int k = 1; k <= M; ++k) {
      lb.dirac(k, M + 1 + (k - 1)) = amp * std::sqrt(static_cast<double>(k));
      lb.dirac(M + 1 + (k - 1), k) = lb.dirac(k, M + 1 + (k - 1));
    }
    for (int k = 0; k <= M; ++k) {
      lb.laplacian(k, k) = b * (2 * k + 1);
      lb.curvature(k, k) = -b;
    }
    for (int k = 0; k < M; ++k) {
      lb.laplacian(M + 1 + k, M + 1 + k) = b * (2 * k + 1);
      lb.curvature(M + 1 + k, M + 1 + k) = b;
    }
  }
  return lb;
}

enum class TorusWhat { Dirac, Laplacian, Curvature };

OperatorMatrix torus_operator(const DiracBundleSpec& bundle, int resolution, TorusWhat what) {
  require_resolution(resolution);
  validate(bundle);
  OperatorMatrix op;
  op.layout = Layout::Fourier;
  op.what = what == TorusWhat::Dirac ? "dirac" : what == TorusWhat::Laplacian ? "laplacian" : "curvature";
  op.symmetry = Symmetry::Hermitian;
  const double B = bundle.field();
  if (B == 0.0) {
    const auto modes = torus_modes(bundle, resolution);
    const int size = 2 * static_cast<int>(modes.size());
    if (size > kMaxTorusUnknowns)
      throw Error(ErrorKind::Resolution, "torus resolution " + std::to_string(resolution) +
                                             " exceeds the dense Fourier assembly limit (at most 44)");
    op.entries = Eigen::MatrixXcd::Zero(size, size);
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const int o = 2 * static_cast<int>(j);
      const double p1 = modes[j].p1, p2 = modes[j].p2;
      if (what == TorusWhat::Dirac) {
        // -(sigma1 p1 + sigma2 p2)
        op.entries(o, o + 1) = -(p1 - I * p2);
        op.entries(o + 1, o) = -(p1 + I * p2);
      } else if (what == TorusWhat::Laplacian) {
        op.entries(o, o) = op.entries(o + 1, o + 1) = p1 * p1 + p2 * p2;
      }
      op.blocks.push_back({o, 2});
      op.coords.push_back(j);
      op.coords.push_back(j);
      op.component.push_back(0);
      op.component.push_back(1);
    }
  } else {
    const int copies = std::abs(torus_flux(bundle));
    const int M = resolution;
    const LandauBlocks lb = landau_block(B, M);
    const Eigen::MatrixXd& blk =
        what == TorusWhat::Dirac ? lb.dirac : what == TorusWhat::Laplacian ? lb.laplacian : lb.curvature;
    const int bs = 2 * M + 1;
    op.entries = Eigen::MatrixXcd::Zero(copies * bs, copies * bs);
    for (int c = 0; c < copies; ++c) {
      op.entries.block(c * bs, c * bs, bs, bs) = blk.cast<cplx>();
      op.blocks.push_back({c * bs, bs});
      for (int k = 0; k < bs; ++k) {
        op.coords.push_back(c);
        const bool upper = B > 0 ? k < M : k <= M;
        op.component.push_back(upper ? 0 : 1);
      }
    }
  }
  op.weights = Eigen::VectorXd::Ones(op.entries.rows());
  op.resolution = resolution;
  return op;
}

bool needs_swap(const RadialMode& m) { return m.singularLeft && m.alpha() < 0.0; }

EndLine swap_end(const EndLine& e) {
  if (e.kind == EndLine::Kind::F2Zero) return EndLine::line(0.0);
  if (e.kind != EndLine::Kind::Line) return e;
  if (e.c == cplx(0.0)) return EndLine::f2zero();
  return EndLine::line(1.0 / e.c);
}

// With (g1, g2) = (f2, f1) the system keeps its form with kt -> -kt and D -> -D, so a mode whose
// f1 is singular at the left end is discretized with f2 at the centres.
ModeProblem oriented(const ModeProblem& p) {
  if (!needs_swap(p.mode)) return p;
  ModeProblem q = p;
  const auto kt = p.mode.kt;
  q.mode.kt = [kt](double x) { return -kt(x); };
  q.mode.label = -p.mode.label;
  q.left = swap_end(p.left);
  q.right = swap_end(p.right);
  return q;
}

// Grid for the oriented problem q = oriented(p).
StaggeredGrid grid_for(const ModeProblem& p, int resolution) {
  const ModeProblem q = oriented(p);
  const bool leftNode = !q.mode.singularLeft && is_line(q.left);
  const bool rightNode = is_line(q.right);
  return make_grid(q.mode, resolution, leftNode, rightNode, needs_swap(p.mode));
}

void tag_mode(OperatorMatrix& op, const ModeProblem& p, double label) {
  op.modeIndex = label;
  op.parity = p.parity;
  op.multiplicity = p.mode.multiplicity;
  op.status = p.status();
}

}  // namespace

double operator_label(const DiracBundleSpec& bundle, const OperatorMatrix& op) {
  if (!op.modeIndex) throw Error(ErrorKind::Argument, "operator carries no mode label");
  double label = *op.modeIndex;
  // cylinder operators store the momentum; recover the integer index
  if (bundle.geometry.kind == GeometryKind::Cylinder) {
    const double C = bundle.geometry.len(bundle.geometry.circumference);
    label = std::round(label * C / (2.0 * kPi) - 0.5 * bundle.geometry.spin[0]);
  }
  return label;
}

RadialMode operator_mode(const DiracBundleSpec& bundle, const OperatorMatrix& op) {
  return mode_problem(bundle, BoundaryCondition::none(), operator_label(bundle, op), op.parity == 0 ? 1 : op.parity)
      .mode;
}

const char* symmetry_name(Symmetry s) {
  switch (s) {
    case Symmetry::Hermitian: return "hermitian";
    case Symmetry::SkewHermitian: return "skew-hermitian";
    case Symmetry::General: return "general";
  }
  return "general";
}

double SpinorField::norm() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) s += weights[i] * std::norm(values[i]);
  return std::sqrt(s);
}

Eigen::VectorXcd OperatorMatrix::applyNodal(const Eigen::VectorXcd& v) const {
  const Eigen::VectorXd s = weights.cwiseSqrt();
  Eigen::VectorXcd sv = s.cwiseProduct(v);
  Eigen::VectorXcd out = entries * sv;
  return out.cwiseQuotient(s.cast<cplx>());
}

bool check_symmetry(const OperatorMatrix& op, double relTol) {
  const double scale = op.entries.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  const double dev = (op.entries - op.entries.adjoint()).cwiseAbs().maxCoeff();
  switch (op.symmetry) {
    case Symmetry::Hermitian: return dev <= relTol * scale;
    case Symmetry::SkewHermitian: return (op.entries + op.entries.adjoint()).cwiseAbs().maxCoeff() <= relTol * scale;
    case Symmetry::General: return true;
  }
  return true;
}

std::vector<TorusMode> torus_modes(const DiracBundleSpec& bundle, int resolution) {
  const auto& g = bundle.geometry;
  const int K = resolution / 2;
  const double L1 = g.len(g.L1), L2 = g.len(g.L2);
  std::vector<TorusMode> out;
  out.reserve((2 * K + 1) * (2 * K + 1));
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      out.push_back({k1, k2, 2.0 * kPi * (k1 + 0.5 * g.spin[0]) / L1, 2.0 * kPi * (k2 + 0.5 * g.spin[1]) / L2});
  return out;
}

OperatorMatrix assemble_mode_dirac(const ModeProblem& p, int resolution) {
  require_resolution(resolution);
  OperatorMatrix op;
  const auto status = p.status();
  if (status != ModeProblem::Status::Regular) {
    op.what = "dirac";
    op.entries.resize(0, 0);
    op.weights.resize(0);
    tag_mode(op, p, p.mode.label);
    return op;
  }
  const StaggeredGrid g = grid_for(p, resolution);
  const ModeProblem q = oriented(p);
  const cplx cL = is_line(q.left) ? q.left.c : cplx(0.0);
  const cplx cR = is_line(q.right) ? q.right.c : cplx(0.0);
  Eigen::MatrixXcd K = staggered_dirac(q.mode, g, cL, cR);
  if (g.swapped) K = -K;
  op = from_nodal("dirac", g, K, p.hermitian() ? Symmetry::Hermitian : Symmetry::General);
  tag_mode(op, p, p.mode.label);
  return op;
}

OperatorMatrix assemble_mode_laplacian(const ModeProblem& p, const DiracBundleSpec& bundle, int resolution) {
  require_resolution(resolution);
  if (p.mode.n != 2) throw Error(ErrorKind::Capability, "per-mode connection Laplacian is available for n = 2");
  const ModeProblem q = oriented(p);
  const RadialMode& m = q.mode;
  const StaggeredGrid g = grid_for(p, resolution);
  const int N = g.N;
  const double h = g.h;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.size(), g.size());
  auto edge = [&A](int i, int j, double e) {
    A(i, i) += e;
    A(j, j) += e;
    A(i, j) -= e;
    A(j, i) -= e;
  };
  for (int j = 1; j < N; ++j) edge(g.f1(j), g.f1(j + 1), m.w(g.node(j)) / h);
  for (std::size_t k = 0; k + 1 < g.f2nodes.size(); ++k) {
    const int i = g.f2nodes[k];
    edge(g.f2(i), g.f2(i + 1), m.w(g.centre(i + 1)) / h);
  }
  Eigen::MatrixXcd K = g.W.cwiseInverse().asDiagonal() * A.cast<cplx>();
  for (int j = 1; j <= N; ++j) {
    const double c = g.centre(j), q = m.q1(c);
    K(g.f1(j), g.f1(j)) += q * q;
  }
  for (int i : g.f2nodes) {
    const double r = g.node(i), t = m.kt(r) + 0.5 * m.dw(r) / m.w(r);
    K(g.f2(i), g.f2(i)) += t * t;
  }
  (void)bundle;
  OperatorMatrix op = from_nodal("laplacian", g, K, Symmetry::Hermitian);
  tag_mode(op, p, p.mode.label);
  return op;
}

namespace {
OperatorMatrix mode_curvature(const ModeProblem& p, const DiracBundleSpec& bundle, int resolution) {
  const StaggeredGrid g = grid_for(p, resolution);
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(g.size(), g.size());
  const double up = curvature_shift_upper(bundle), lo = curvature_shift_lower(bundle);
  for (int k = 0; k < g.size(); ++k) K(k, k) = g.component[k] == 0 ? up : lo;
  OperatorMatrix op = from_nodal("curvature", g, K, Symmetry::Hermitian);
  tag_mode(op, p, p.mode.label);
  return op;
}

ModeProblem natural_problem(const DiracBundleSpec& bundle, double mode, int parity) {
  ModeProblem p = mode_problem(bundle, BoundaryCondition::none(), mode, parity);
  // Without a boundary condition both boundary nodes are kept with a zero closure in the matrix
  // (f1 = 0, or f2 = 0 on a swapped grid); boundary traces enter only through ibp_residual.
  const EndLine closure = needs_swap(p.mode) ? EndLine::f2zero() : EndLine::line(0.0);
  if (!p.mode.singularLeft) p.left = closure;
  if (!p.mode.equatorRight) p.right = closure;
  return p;
}
}  // namespace

OperatorMatrix assemble_dirac(const DiracBundleSpec& bundle, int resolution, std::optional<double> mode,
                              int parity) {
  require_resolution(resolution);
  validate(bundle);
  if (bundle.geometry.kind == GeometryKind::FlatTorus2) return torus_operator(bundle, resolution, TorusWhat::Dirac);
  if (!mode) throw Error(ErrorKind::Argument, "per-mode geometries need a mode label");
  ModeProblem p = natural_problem(bundle, *mode, parity);
  OperatorMatrix op = assemble_mode_dirac(p, resolution);
  op.bc.reset();
  return op;
}

OperatorMatrix assemble_connection_laplacian(const DiracBundleSpec& bundle, int resolution,
                                             std::optional<double> mode, int parity) {
  require_resolution(resolution);
  validate(bundle);
  if (bundle.geometry.kind == GeometryKind::FlatTorus2)
    return torus_operator(bundle, resolution, TorusWhat::Laplacian);
  if (!mode) throw Error(ErrorKind::Argument, "per-mode geometries need a mode label");
  return assemble_mode_laplacian(natural_problem(bundle, *mode, parity), bundle, resolution);
}

OperatorMatrix assemble_curvature(const DiracBundleSpec& bundle, int resolution, std::optional<double> mode,
                                  int parity) {
  require_resolution(resolution);
  validate(bundle);
  if (bundle.geometry.kind == GeometryKind::FlatTorus2)
    return torus_operator(bundle, resolution, TorusWhat::Curvature);
  if (!mode) throw Error(ErrorKind::Argument, "per-mode geometries need a mode label");
  return mode_curvature(natural_problem(bundle, *mode, parity), bundle, resolution);
}

OperatorMatrix boundary_dirac(const DiracBundleSpec& bundle, int resolution) {
  require_resolution(resolution);
  validate(bundle);
  const auto& g = bundle.geometry;
  const auto inv = invariants(g);
  if (!inv.hasBoundary) throw Error(ErrorKind::NoBoundary, "geometry has no boundary");
  if (g.n != 2) throw Error(ErrorKind::Capability, "boundary Dirac operator is implemented for boundary circles");
  const int N = resolution;
  const int nc = static_cast<int>(inv.boundary.size());
  OperatorMatrix op;
  op.what = "boundary-dirac";
  op.layout = Layout::Boundary;
  op.symmetry = Symmetry::Hermitian;
  op.entries = Eigen::MatrixXcd::Zero(2 * N * nc, 2 * N * nc);
  op.weights.resize(2 * N * nc);
  const double B = bundle.field();
  for (int c = 0; c < nc; ++c) {
    const auto& comp = inv.boundary[c];
    // arc length of the circle and tangential momentum shift
    double len, shift = 0.0, twist = 0.0;
    if (g.kind == GeometryKind::Cylinder) {
      len = g.len(g.circumference);
      shift = 0.5 * g.spin[0];
      twist = B * comp.position;
    } else {
      len = 2.0 * kPi * comp.position;
      twist = 0.5 * B * comp.position;
    }
    // spectral derivative d/ds on N equispaced points, modes k + shift
    // the derivative matrix is circulant up to the phase of the shifted modes
    // modes with |k + shift| < N/2 (the unpaired Nyquist mode is dropped)
    std::vector<double> modes;
    for (int k = -N; k <= N; ++k)
      if (std::abs(k + shift) < 0.5 * N - 1e-9) modes.push_back(k + shift);
    std::vector<cplx> row(2 * N - 1);
    for (int d = -(N - 1); d <= N - 1; ++d) {
      cplx sum = 0.0;
      for (const double kk : modes) sum += I * (2.0 * kPi * kk / len) * std::exp(I * (2.0 * kPi * kk * d / N));
      row[d + N - 1] = sum / static_cast<double>(N);
    }
    Eigen::MatrixXcd Ds(N, N);
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) Ds(j, l) = row[j - l + N - 1];
    Eigen::MatrixXcd tang = Ds + I * twist * Eigen::MatrixXcd::Identity(N, N);
    // nu . e_alpha = outwardSign * (-i sigma3)
    const cplx f = -I * static_cast<double>(comp.outwardSign);
    const int o = 2 * N * c;
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        op.entries(o + 2 * j, o + 2 * l) = f * tang(j, l);
        op.entries(o + 2 * j + 1, o + 2 * l + 1) = -f * tang(j, l);
      }
    for (int k = 0; k < 2 * N; ++k) {
      op.entries(o + k, o + k) += 0.5 * comp.meanCurvature;
      op.weights[o + k] = len / N;
    }
    for (int j = 0; j < N; ++j)
      for (int s = 0; s < 2; ++s) {
        op.coords.push_back(len * j / N);
        op.component.push_back(s);
      }
    op.blocks.push_back({o, 2 * N});
  }
  op.resolution = resolution;
  return op;
}

OperatorMatrix apply_bc(const OperatorMatrix& op, const BoundaryCondition& bc,
                        const std::optional<OperatorMatrix>& boundaryDirac, const DiracBundleSpec& bundle,
                        int resolution) {
  validate(bc);
  if (op.layout != Layout::Staggered || !op.modeIndex)
    throw Error(ErrorKind::Argument, "boundary conditions are imposed on per-mode Dirac operators");
  if (!invariants(bundle.geometry).hasBoundary) throw Error(ErrorKind::NoBoundary, "geometry has no boundary");
  const bool aps = bc.kind == BCKind::APS || bc.kind == BCKind::ModifiedAPS;
  if (aps && !boundaryDirac) throw Error(ErrorKind::Argument, "APS-type conditions need the boundary Dirac operator");
  const double label = operator_label(bundle, op);
  ModeProblem p = mode_problem(bundle, bc, label, op.parity == 0 ? 1 : op.parity);
  if (aps && bundle.geometry.n == 2) {
    // Cross-check the per-mode boundary spectrum against the assembled boundary operator by the
    // Rayleigh quotient of the mode's upper component on the outer circle.
    const auto& bd = *boundaryDirac;
    const auto inv = invariants(bundle.geometry);
    const int nc = static_cast<int>(inv.boundary.size());
    const int Nb = static_cast<int>(bd.size()) / (2 * nc);
    const auto& comp = inv.boundary.back();
    const double expect = comp.outwardSign * p.mode.kt(p.mode.b);
    // Cartesian upper component of a rotating-frame upper mode carries e^{i(m-1/2)phi};
    // on the cylinder the frame does not rotate.
    const bool cyl = bundle.geometry.kind == GeometryKind::Cylinder;
    const double kk = cyl ? label + 0.5 * bundle.geometry.spin[0] : p.mode.label - 0.5;
    if (std::abs(kk) < (Nb - 1) / 2) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(bd.size());
      const int o = 2 * Nb * (nc - 1);
      for (int j = 0; j < Nb; ++j) v[o + 2 * j] = std::exp(I * (2.0 * kPi * kk * j / Nb));
      const cplx rq = v.dot(bd.entries * v) / v.squaredNorm();
      const double got = rq.real() - 0.5 * comp.meanCurvature + (cyl ? 0.0 : 0.5 / comp.position);
      if (std::abs(got - expect) > 1e-8 * std::max(1.0, std::abs(expect)))
        throw Error(ErrorKind::Argument, "boundary operator does not match the bundle's boundary spectrum");
    }
  }
  OperatorMatrix out = assemble_mode_dirac(p, resolution);
  out.bc = bc;
  return out;
}

SpinorField sample_mode_field(const OperatorMatrix& op, const std::function<cplx(double)>& f1,
                              const std::function<cplx(double)>& f2, double a, double b) {
  SpinorField s;
  s.layout = op.layout;
  s.coords = op.coords;
  s.component = op.component;
  s.weights = op.weights;
  s.values.resize(op.size());
  for (Eigen::Index k = 0; k < op.size(); ++k) s.values[k] = op.component[k] == 0 ? f1(op.coords[k]) : f2(op.coords[k]);
  s.traceLeft = std::make_pair(f1(a), f2(a));
  s.traceRight = std::make_pair(f1(b), f2(b));
  return s;
}

double ibp_residual(const OperatorMatrix& op, const DiracBundleSpec& bundle, const SpinorField& s1,
                    const SpinorField& s2) {
  if (s1.values.size() != op.size() || s2.values.size() != op.size())
    throw Error(ErrorKind::Shape, "fields do not live on the operator's grid");
  if (op.layout == Layout::Fourier) {
    const Eigen::VectorXcd d1 = op.entries * s1.values, d2 = op.entries * s2.values;
    return std::abs(s2.values.dot(d1) - d2.dot(s1.values));
  }
  if (op.layout != Layout::Staggered || !op.modeIndex)
    throw Error(ErrorKind::Argument, "integration by parts check needs a Fourier or per-mode operator");
  const double label = operator_label(bundle, op);
  const ModeProblem p = natural_problem(bundle, label, op.parity == 0 ? 1 : op.parity);
  const RadialMode& m = p.mode;
  const double h = op.h;
  auto apply = [&](const SpinorField& s) {
    Eigen::VectorXcd d = op.applyNodal(s.values);
    // boundary node rows use the traces of the centre component
    const bool swapped = op.component[0] == 1;
    for (Eigen::Index k = 0; k < op.size(); ++k) {
      if (op.component[k] != (swapped ? 0 : 1)) continue;
      const double x = op.coords[k];
      const double sg = swapped ? -1.0 : 1.0;
      auto centre_trace = [swapped](const std::pair<cplx, cplx>& t) { return swapped ? t.second : t.first; };
      if (!m.equatorRight && std::abs(x - m.b) < 0.25 * h && s.traceRight)
        d[k] += sg * 2.0 / h * centre_trace(*s.traceRight);
      if (!m.singularLeft && std::abs(x - m.a) < 0.25 * h && s.traceLeft)
        d[k] -= sg * 2.0 / h * centre_trace(*s.traceLeft);
    }
    return d;
  };
  const Eigen::VectorXcd d1 = apply(s1), d2 = apply(s2);
  cplx lhs = 0.0;
  for (Eigen::Index k = 0; k < op.size(); ++k)
    lhs += op.weights[k] * (d1[k] * std::conj(s2.values[k]) - s1.values[k] * std::conj(d2[k]));
  cplx bterm = 0.0;
  if (!m.equatorRight && s1.traceRight && s2.traceRight) {
    const auto [a1, b1] = *s1.traceRight;
    const auto [a2, b2] = *s2.traceRight;
    bterm += m.w(m.b) * (a1 * std::conj(b2) - b1 * std::conj(a2));
  }
  if (!m.singularLeft && s1.traceLeft && s2.traceLeft) {
    const auto [a1, b1] = *s1.traceLeft;
    const auto [a2, b2] = *s2.traceLeft;
    bterm -= m.w(m.a) * (a1 * std::conj(b2) - b1 * std::conj(a2));
  }
  return std::abs(lhs - bterm);
}

std::string export_triplets(const OperatorMatrix& op, double dropTol) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < op.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < op.entries.cols(); ++j) {
      const cplx v = op.entries(i, j);
      if (std::abs(v) > dropTol) os << i << ' ' << j << ' ' << v.real() << ' ' << v.imag() << '\n';
    }
  return os.str();
}

}  // namespace db
