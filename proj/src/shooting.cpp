#include <algorithm>
#include <cmath>
#include <numbers>

#include "diracbound/eigensolve.hpp"
#include "diracbound/errors.hpp"

namespace db {

namespace {
constexpr double kPi = std::numbers::pi;

// Fixed integration grid with coefficients cached at nodes and midpoints.
struct Grid {
  std::vector<double> x;
  std::vector<double> q1, g;        // at nodes
  std::vector<double> q1m, gm;      // at midpoints
};

struct State {
  cplx y1, y2, z1, z2;
};

class Shooter {
 public:
  explicit Shooter(const ShootingProblem& sp) : sp_(sp) {
    const ModeProblem& p = sp.problem;
    if (p.status() != ModeProblem::Status::Regular)
      throw Error(ErrorKind::Argument, "shooting needs endpoint relations that fix a line");
    const RadialMode& m = p.mode;
    const double span = m.b - m.a;
    const double lamMax = std::max(std::abs(sp.lower), std::abs(sp.upper));
    const int uniform = std::max(sp.steps, static_cast<int>(std::ceil(60.0 * span * lamMax)));
    std::vector<double> nodes;
    if (m.singularLeft) {
      const double r0 = 1e-6 * span, r1 = 0.02 * span;
      const double a = std::abs(m.alpha()) + m.weightPower + 1.0;
      const double ratio = 1.0 + 0.1 / a;
      for (double r = r0; r < r1; r *= ratio) nodes.push_back(m.a + r);
      for (int i = 0; i <= uniform; ++i) nodes.push_back(m.a + r1 + (span - r1) * i / uniform);
    } else {
      for (int i = 0; i <= uniform; ++i) nodes.push_back(m.a + span * i / uniform);
    }
    coarse_ = make_grid(nodes);
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      fine.push_back(nodes[i]);
      fine.push_back(0.5 * (nodes[i] + nodes[i + 1]));
    }
    fine.push_back(nodes.back());
    fine_ = make_grid(fine);
  }

  struct Result {
    cplx det, ddet;
    double yNorm;
  };

  Result evaluate(cplx lambda) const {
    const Result c = run(coarse_, lambda), f = run(fine_, lambda);
    return {(16.0 * f.det - c.det) / 15.0, (16.0 * f.ddet - c.ddet) / 15.0, f.yNorm};
  }

 private:
  Grid make_grid(const std::vector<double>& nodes) const {
    const RadialMode& m = sp_.problem.mode;
    Grid g;
    g.x = nodes;
    for (double x : nodes) {
      g.q1.push_back(m.q1(x));
      g.g.push_back(m.dw(x) / m.w(x));
    }
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double x = 0.5 * (nodes[i] + nodes[i + 1]);
      g.q1m.push_back(m.q1(x));
      g.gm.push_back(m.dw(x) / m.w(x));
    }
    return g;
  }

  static State rhs(const State& s, double q1, double g, cplx lam) {
    return {-q1 * s.y1 + lam * s.y2, (q1 - g) * s.y2 - lam * s.y1, -q1 * s.z1 + lam * s.z2 + s.y2,
            (q1 - g) * s.z2 - lam * s.z1 - s.y1};
  }
  static State axpy(const State& s, double h, const State& k) {
    return {s.y1 + h * k.y1, s.y2 + h * k.y2, s.z1 + h * k.z1, s.z2 + h * k.z2};
  }

  State start(cplx lam, double x0) const {
    const ModeProblem& p = sp_.problem;
    const RadialMode& m = p.mode;
    if (m.singularLeft) {
      const double span = m.b - m.a, t = (x0 - m.a) / span;
      const double alpha = m.alpha(), beta = m.weightPower + alpha;
      if (alpha >= 0.0) {
        const double c = -span * std::pow(t, alpha + 1.0) / (alpha + 1.0 + beta);
        return {std::pow(t, alpha), lam * c, 0.0, c};
      }
      const double d = span * std::pow(t, 1.0 - beta) / (1.0 - beta - alpha);
      return {lam * d, std::pow(t, -beta), d, 0.0};
    }
    if (p.left.kind == EndLine::Kind::F2Zero) return {1.0, 0.0, 0.0, 0.0};
    return {p.left.c, 1.0, 0.0, 0.0};
  }

  Result run(const Grid& g, cplx lam) const {
    State s = start(lam, g.x.front());
    for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
      const double h = g.x[i + 1] - g.x[i];
      const State k1 = rhs(s, g.q1[i], g.g[i], lam);
      const State k2 = rhs(axpy(s, 0.5 * h, k1), g.q1m[i], g.gm[i], lam);
      const State k3 = rhs(axpy(s, 0.5 * h, k2), g.q1m[i], g.gm[i], lam);
      const State k4 = rhs(axpy(s, h, k3), g.q1[i + 1], g.g[i + 1], lam);
      s.y1 += h / 6.0 * (k1.y1 + 2.0 * k2.y1 + 2.0 * k3.y1 + k4.y1);
      s.y2 += h / 6.0 * (k1.y2 + 2.0 * k2.y2 + 2.0 * k3.y2 + k4.y2);
      s.z1 += h / 6.0 * (k1.z1 + 2.0 * k2.z1 + 2.0 * k3.z1 + k4.z1);
      s.z2 += h / 6.0 * (k1.z2 + 2.0 * k2.z2 + 2.0 * k3.z2 + k4.z2);
    }
    const EndLine& r = sp_.problem.right;
    const double yn = std::hypot(std::abs(s.y1), std::abs(s.y2));
    if (r.kind == EndLine::Kind::F2Zero) return {s.y2, s.z2, yn};
    return {s.y1 - r.c * s.y2, s.z1 - r.c * s.z2, yn};
  }

  const ShootingProblem& sp_;
  Grid coarse_, fine_;
};

struct ContourResult {
  double windingArg = 0.0;
  double windingTrap = 0.0;
  bool ok = false;
};

// Adaptive integration of d arg f and f'/f along the segment [z0, z1].
void segment(const Shooter& sh, cplx z0, cplx z1, const Shooter::Result& f0, const Shooter::Result& f1, int depth,
             double& argSum, cplx& trapSum, bool& ok) {
  const double darg = std::arg(f1.det / f0.det);
  const cplx trap = 0.5 * (f0.ddet / f0.det + f1.ddet / f1.det) * (z1 - z0);
  const cplx zm = 0.5 * (z0 + z1);
  const Shooter::Result fm = sh.evaluate(zm);
  const cplx trap2 = 0.25 * (f0.ddet / f0.det + 2.0 * fm.ddet / fm.det + f1.ddet / f1.det) * (z1 - z0);
  const bool fine = std::abs(darg) < 0.2 && std::abs(trap2 - trap) < 1e-5;
  if (fine || depth > 40) {
    if (!fine) ok = false;
    argSum += std::arg(fm.det / f0.det) + std::arg(f1.det / fm.det);
    trapSum += trap2 + (trap2 - trap) / 3.0;
    return;
  }
  segment(sh, z0, zm, f0, fm, depth + 1, argSum, trapSum, ok);
  segment(sh, zm, z1, fm, f1, depth + 1, argSum, trapSum, ok);
}

ContourResult contour(const Shooter& sh, cplx lo, cplx hi) {
  const cplx corners[4] = {lo, cplx(hi.real(), lo.imag()), hi, cplx(lo.real(), hi.imag())};
  ContourResult r;
  double argSum = 0.0;
  cplx trapSum = 0.0;
  bool ok = true;
  for (int e = 0; e < 4; ++e) {
    const cplx z0 = corners[e], z1 = corners[(e + 1) % 4];
    // start each edge from a few equal pieces
    const int pieces = 8;
    Shooter::Result prev = sh.evaluate(z0);
    if (std::abs(prev.det) == 0.0) return r;
    for (int k = 1; k <= pieces; ++k) {
      const cplx za = z0 + (z1 - z0) * (double(k - 1) / pieces), zb = z0 + (z1 - z0) * (double(k) / pieces);
      const Shooter::Result next = sh.evaluate(zb);
      if (std::abs(next.det) == 0.0) return r;
      segment(sh, za, zb, prev, next, 0, argSum, trapSum, ok);
      prev = next;
    }
  }
  r.windingArg = argSum / (2.0 * kPi);
  r.windingTrap = (trapSum / cplx(0.0, 2.0 * kPi)).real();
  const double n = std::round(r.windingArg);
  r.ok = ok && std::abs(r.windingArg - n) < 1e-6 && std::abs(r.windingTrap - n) < 1e-3;
  return r;
}

bool newton(const Shooter& sh, cplx z, cplx lo, cplx hi, cplx& root) {
  const double size = std::abs(hi - lo);
  for (int it = 0; it < 60; ++it) {
    const Shooter::Result f = sh.evaluate(z);
    if (f.ddet == 0.0) return false;
    const cplx step = f.det / f.ddet;
    z -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) break;
    if (std::abs(z - 0.5 * (lo + hi)) > 2.0 * size) return false;
  }
  const Shooter::Result f = sh.evaluate(z);
  const bool inside = z.real() >= lo.real() && z.real() <= hi.real() && z.imag() >= lo.imag() && z.imag() <= hi.imag();
  if (!inside || std::abs(f.det) > 1e-10 * std::max(f.yNorm, 1e-300)) return false;
  root = z;
  return true;
}

void search(const Shooter& sh, cplx lo, cplx hi, int count, int depth, std::vector<cplx>& roots) {
  if (count <= 0) return;
  if (count == 1) {
    cplx root;
    if (newton(sh, 0.5 * (lo + hi), lo, hi, root)) {
      roots.push_back(root);
      return;
    }
  }
  const double w = hi.real() - lo.real(), h = hi.imag() - lo.imag();
  if (depth > 60 || std::max(w, h) < 1e-9) {
    // a multiple root: polish once and record it with its multiplicity
    cplx root;
    if (newton(sh, 0.5 * (lo + hi), lo - cplx(w, h), hi + cplx(w, h), root))
      for (int i = 0; i < count; ++i) roots.push_back(root);
    return;
  }
  // split the longer side, nudging the cut off any root lying on it
  static const double offsets[] = {0.5 + 0.0123, 0.5 - 0.0417, 0.5 + 0.0931, 0.5 - 0.1377, 0.5 + 0.1811};
  for (double t : offsets) {
    cplx aHi, bLo;
    if (w >= h) {
      const double cut = lo.real() + t * w;
      aHi = cplx(cut, hi.imag());
      bLo = cplx(cut, lo.imag());
    } else {
      const double cut = lo.imag() + t * h;
      aHi = cplx(hi.real(), cut);
      bLo = cplx(lo.real(), cut);
    }
    const ContourResult ca = contour(sh, lo, aHi);
    if (!ca.ok) continue;
    const int na = static_cast<int>(std::round(ca.windingArg));
    if (na < 0 || na > count) continue;
    search(sh, lo, aHi, na, depth + 1, roots);
    search(sh, bLo, hi, count - na, depth + 1, roots);
    return;
  }
  throw Error(ErrorKind::IncompleteSearch, "could not place a subdivision contour away from the roots");
}

}  // namespace

DeterminantValue shooting_determinant(const ShootingProblem& sp, cplx lambda) {
  const Shooter sh(sp);
  const auto r = sh.evaluate(lambda);
  return {r.det, r.ddet};
}

double holomorphy_defect(const ShootingProblem& sp, int samples) {
  const Shooter sh(sp);
  double worst = 0.0;
  const double step = 1e-4 * std::max(1.0, std::abs(sp.upper - sp.lower));
  for (int i = 0; i < samples; ++i) {
    const double s = (i + 0.5) / samples, t = std::fmod(0.618033988749895 * (i + 1), 1.0);
    const cplx z(sp.lower.real() + s * (sp.upper.real() - sp.lower.real()),
                 sp.lower.imag() + t * (sp.upper.imag() - sp.lower.imag()));
    const cplx dx = (sh.evaluate(z + step).det - sh.evaluate(z - step).det) / (2.0 * step);
    const cplx dy = (sh.evaluate(z + cplx(0.0, step)).det - sh.evaluate(z - cplx(0.0, step)).det) / cplx(0.0, 2.0 * step);
    const double scale = std::max({std::abs(dx), std::abs(dy), 1e-300});
    worst = std::max(worst, std::abs(dx - dy) / scale);
  }
  return worst;
}

double winding_number(const ShootingProblem& sp, cplx lower, cplx upper) {
  const Shooter sh(sp);
  const ContourResult c = contour(sh, lower, upper);
  if (!c.ok) throw Error(ErrorKind::IncompleteSearch, "winding number is not integral on this contour");
  return c.windingTrap;
}

std::vector<cplx> nonnormal_mode_roots(const ShootingProblem& sp, int count) {
  if (!(sp.upper.real() > sp.lower.real() && sp.upper.imag() > sp.lower.imag()))
    throw Error(ErrorKind::Parameter, "search rectangle must have positive extent");
  const Shooter sh(sp);
  cplx lo = sp.lower, hi = sp.upper;
  ContourResult c = contour(sh, lo, hi);
  for (int attempt = 0; !c.ok && attempt < 4; ++attempt) {
    // shrink slightly to move the contour off a root
    const cplx d = 0.00713 * (attempt + 1) * (hi - lo);
    lo += d;
    hi -= d;
    c = contour(sh, lo, hi);
  }
  if (!c.ok) throw Error(ErrorKind::IncompleteSearch, "winding number along the search region is not integral");
  const int total = static_cast<int>(std::round(c.windingArg));
  std::vector<cplx> roots;
  search(sh, lo, hi, total, 0, roots);
  if (static_cast<int>(roots.size()) != total)
    throw Error(ErrorKind::IncompleteSearch, "found " + std::to_string(roots.size()) + " roots but the region holds " +
                                                 std::to_string(total));
  std::sort(roots.begin(), roots.end(), eigen_order);
  if (count > 0 && static_cast<int>(roots.size()) > count) roots.resize(count);
  return roots;
}

}  // namespace db
