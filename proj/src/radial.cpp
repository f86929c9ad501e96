#include "diracbound/radial.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "diracbound/errors.hpp"

namespace db {

namespace {
constexpr double kPi = std::numbers::pi;
const std::complex<double> I(0.0, 1.0);
}  // namespace

bool BoundaryCondition::realSpectrum() const {
  switch (kind) {
    case BCKind::None: return true;
    case BCKind::MITBag: return false;
    case BCKind::LocalChirality: return true;
    case BCKind::APS:
    case BCKind::ModifiedAPS: return b <= 0.0;
  }
  return true;
}

std::string BoundaryCondition::describe() const {
  std::ostringstream os;
  switch (kind) {
    case BCKind::None: os << "none"; break;
    case BCKind::MITBag: os << "mit(" << (sign > 0 ? "+" : "-") << ")"; break;
    case BCKind::LocalChirality: os << "local(" << (sign > 0 ? "+" : "-") << ")"; break;
    case BCKind::APS: os << "aps(b=" << b << ")"; break;
    case BCKind::ModifiedAPS: os << "maps(b=" << b << "," << (sign > 0 ? "+" : "-") << ")"; break;
  }
  return os.str();
}

void validate(const BoundaryCondition& bc) {
  if (bc.sign != 1 && bc.sign != -1) throw Error(ErrorKind::Parameter, "boundary condition sign must be +1 or -1");
  if (!std::isfinite(bc.b)) throw Error(ErrorKind::Parameter, "APS threshold b must be finite");
}

std::string RadialMode::describe() const {
  std::ostringstream os;
  os << "mode " << label << " on [" << a << "," << b << "]";
  return os.str();
}

EndLine boundary_line(const BoundaryCondition& bc, int eps, double tangential) {
  const double s = bc.sign;
  switch (bc.kind) {
    case BCKind::None: return EndLine::free();
    case BCKind::MITBag: return EndLine::line(I * (s * eps));
    case BCKind::LocalChirality: return EndLine::line(s * eps);
    case BCKind::APS:
    case BCKind::ModifiedAPS: {
      const double upper = eps * tangential, lower = -eps * tangential;
      const bool upOk = upper <= bc.b, lowOk = lower <= bc.b;
      if (upOk && lowOk) return EndLine::free();
      if (!upOk && !lowOk) return EndLine::empty();
      if (bc.kind == BCKind::APS) return upOk ? EndLine::f2zero() : EndLine::line(0.0);
      // t = s + sign*nu*s must have only the allowed component.
      return upOk ? EndLine::line(-s * eps) : EndLine::line(s * eps);
    }
  }
  return EndLine::free();
}

ModeProblem::Status ModeProblem::status() const {
  const bool leftEmpty = !mode.singularLeft && left.kind == EndLine::Kind::Empty;
  if (leftEmpty || right.kind == EndLine::Kind::Empty) return Status::NoEigenvalues;
  const bool leftFree = !mode.singularLeft && left.kind == EndLine::Kind::Free;
  if (leftFree || right.kind == EndLine::Kind::Free) return Status::AllLambda;
  return Status::Regular;
}

bool ModeProblem::hermitian() const {
  auto real = [](const EndLine& e) { return e.kind != EndLine::Kind::Line || e.c.imag() == 0.0; };
  return (mode.singularLeft || real(left)) && real(right);
}

bool has_mode_reduction(const GeometrySpec& g) {
  if (g.kind == GeometryKind::FlatTorus2) return false;
  if (g.kind == GeometryKind::Cylinder && g.n != 2) return false;
  return true;
}

double mode_label(const DiracBundleSpec& bundle, int index, int sign) {
  const auto& g = bundle.geometry;
  const double sg = sign >= 0 ? 1.0 : -1.0;
  if (g.kind == GeometryKind::Cylinder) return sign >= 0 ? index : -index - 1;
  if (g.n == 3) return sg * (index + 1);
  return sg * (index + 0.5);
}

ModeProblem mode_problem(const DiracBundleSpec& bundle, const BoundaryCondition& bc, double label,
                         int parity) {
  validate(bundle);
  validate(bc);
  const auto& g = bundle.geometry;
  if (!has_mode_reduction(g))
    throw Error(ErrorKind::Capability, std::string("no per-mode reduction for ") + geometry_kind_name(g.kind));
  const double B = bundle.field();
  ModeProblem p;
  RadialMode& m = p.mode;
  m.n = g.n;
  m.label = label;
  switch (g.kind) {
    case GeometryKind::RoundSphere: {
      const double r = g.len(g.radius);
      m.a = 0.0;
      m.b = 0.5 * kPi * r;
      m.singularLeft = true;
      m.equatorRight = true;
      if (g.n == 2) {
        if (std::abs(std::abs(std::fmod(label, 1.0)) - 0.5) > 1e-12)
          throw Error(ErrorKind::Parameter, "sphere modes are half-integers");
        m.weightPower = 1;
        m.w = [r](double x) { return std::sin(x / r); };
        m.dw = [r](double x) { return std::cos(x / r) / r; };
      } else {
        if (label == 0.0 || std::fmod(label, 1.0) != 0.0)
          throw Error(ErrorKind::Parameter, "3-sphere modes are nonzero integers");
        m.weightPower = 2;
        m.multiplicity = 2 * static_cast<int>(std::abs(label));
        m.w = [r](double x) { return std::pow(std::sin(x / r), 2); };
        m.dw = [r](double x) { return 2.0 * std::sin(x / r) * std::cos(x / r) / r; };
      }
      m.kt = [r, label](double x) { return label / (r * std::sin(x / r)); };
      if (parity != 1 && parity != -1) throw Error(ErrorKind::Parameter, "sphere parity must be +1 or -1");
      p.parity = parity;
      p.right = EndLine::line(static_cast<double>(parity));
      return p;
    }
    case GeometryKind::UnitDisk:
    case GeometryKind::Annulus: {
      const bool disk = g.kind == GeometryKind::UnitDisk;
      m.a = disk ? 0.0 : g.len(g.rho_in);
      m.b = disk ? g.len(g.radius) : g.len(g.rho_out);
      m.singularLeft = disk;
      if (g.n == 2) {
        if (std::abs(std::abs(std::fmod(label, 1.0)) - 0.5) > 1e-12)
          throw Error(ErrorKind::Parameter, "disk modes are half-integers");
        m.weightPower = 1;
        m.w = [](double x) { return x; };
        m.dw = [](double) { return 1.0; };
        m.kt = [label, B](double x) { return label / x + 0.5 * B * x; };
      } else {
        if (label == 0.0 || std::fmod(label, 1.0) != 0.0)
          throw Error(ErrorKind::Parameter, "ball modes are nonzero integers");
        if (bc.kind == BCKind::LocalChirality)
          throw Error(ErrorKind::Capability, "the chirality condition couples ball modes; not supported in n = 3");
        m.weightPower = 2;
        m.multiplicity = 2 * static_cast<int>(std::abs(label));
        m.w = [](double x) { return x * x; };
        m.dw = [](double x) { return 2.0 * x; };
        m.kt = [label](double x) { return label / x; };
      }
      if (!disk) p.left = boundary_line(bc, -1, m.kt(m.a));
      p.right = boundary_line(bc, +1, m.kt(m.b));
      return p;
    }
    case GeometryKind::Cylinder: {
      if (std::fmod(label, 1.0) != 0.0) throw Error(ErrorKind::Parameter, "cylinder momentum index must be an integer");
      const double C = g.len(g.circumference);
      const double mom = 2.0 * kPi * (label + 0.5 * g.spin[0]) / C;
      m.a = 0.0;
      m.b = g.len(g.length);
      m.label = mom;
      m.weightPower = 0;
      m.w = [](double) { return 1.0; };
      m.dw = [](double) { return 0.0; };
      m.kt = [mom, B](double x) { return mom + B * x; };
      p.left = boundary_line(bc, -1, m.kt(m.a));
      p.right = boundary_line(bc, +1, m.kt(m.b));
      return p;
    }
    case GeometryKind::FlatTorus2: break;
  }
  throw Error(ErrorKind::Capability, "no per-mode reduction");
}

std::vector<ModeProblem> mode_problems(const DiracBundleSpec& bundle, const BoundaryCondition& bc,
                                       int modeCount) {
  if (modeCount < 1) throw Error(ErrorKind::Parameter, "mode count must be positive");
  std::vector<ModeProblem> out;
  const bool sphere = bundle.geometry.kind == GeometryKind::RoundSphere;
  for (int sign : {+1, -1})
    for (int i = 0; i < modeCount; ++i) {
      const double label = mode_label(bundle, i, sign);
      if (sphere) {
        out.push_back(mode_problem(bundle, bc, label, +1));
        out.push_back(mode_problem(bundle, bc, label, -1));
      } else {
        out.push_back(mode_problem(bundle, bc, label));
      }
    }
  return out;
}

}  // namespace db
