#include "diracbound/geometry.hpp"

#include <cmath>
#include <numbers>

#include "diracbound/errors.hpp"

namespace db {

namespace {
constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::Parameter, std::string(name) + " must be positive and finite");
}
}  // namespace

const char* geometry_kind_name(GeometryKind k) {
  switch (k) {
    case GeometryKind::FlatTorus2: return "torus";
    case GeometryKind::RoundSphere: return "sphere";
    case GeometryKind::UnitDisk: return "disk";
    case GeometryKind::Annulus: return "annulus";
    case GeometryKind::Cylinder: return "cylinder";
  }
  return "unknown";
}

void validate(const GeometrySpec& g) {
  require_positive(g.scale, "scale");
  switch (g.kind) {
    case GeometryKind::FlatTorus2:
      if (g.n != 2) throw Error(ErrorKind::Dimension, "flat torus is 2-dimensional");
      require_positive(g.L1, "L1");
      require_positive(g.L2, "L2");
      for (int d : g.spin)
        if (d != 0 && d != 1) throw Error(ErrorKind::Parameter, "spin structure entries must be 0 or 1");
      break;
    case GeometryKind::RoundSphere:
      if (g.n != 2 && g.n != 3) throw Error(ErrorKind::Dimension, "sphere dimension must be 2 or 3");
      require_positive(g.radius, "radius");
      break;
    case GeometryKind::UnitDisk:
      if (g.n != 2 && g.n != 3) throw Error(ErrorKind::Dimension, "disk dimension must be 2 or 3");
      require_positive(g.radius, "radius");
      break;
    case GeometryKind::Annulus:
      if (g.n != 2) throw Error(ErrorKind::Dimension, "annulus is 2-dimensional");
      require_positive(g.rho_in, "rho_in");
      require_positive(g.rho_out, "rho_out");
      if (!(g.rho_in < g.rho_out)) throw Error(ErrorKind::Parameter, "rho_in must be below rho_out");
      break;
    case GeometryKind::Cylinder:
      if (g.n != 2 && g.n != 3) throw Error(ErrorKind::Dimension, "cylinder dimension must be 2 or 3");
      require_positive(g.length, "length");
      require_positive(g.circumference, "circumference");
      if (g.spin[0] != 0 && g.spin[0] != 1)
        throw Error(ErrorKind::Parameter, "spin structure must be 0 or 1");
      break;
  }
}

GeometrySpec make_torus(double L1, double L2, std::array<int, 2> spin) {
  GeometrySpec g;
  g.kind = GeometryKind::FlatTorus2;
  g.L1 = L1;
  g.L2 = L2;
  g.spin = spin;
  validate(g);
  return g;
}

GeometrySpec make_sphere(int n, double radius) {
  GeometrySpec g;
  g.kind = GeometryKind::RoundSphere;
  g.n = n;
  g.radius = radius;
  validate(g);
  return g;
}

GeometrySpec make_disk(double radius, int n) {
  GeometrySpec g;
  g.kind = GeometryKind::UnitDisk;
  g.n = n;
  g.radius = radius;
  validate(g);
  return g;
}

GeometrySpec make_annulus(double rho_in, double rho_out) {
  GeometrySpec g;
  g.kind = GeometryKind::Annulus;
  g.rho_in = rho_in;
  g.rho_out = rho_out;
  validate(g);
  return g;
}

GeometrySpec make_cylinder(double length, double circumference, int spin, int n) {
  GeometrySpec g;
  g.kind = GeometryKind::Cylinder;
  g.length = length;
  g.circumference = circumference;
  g.spin = {spin, 0};
  g.n = n;
  validate(g);
  return g;
}

GeometrySpec make_geometry(GeometryKind kind, const std::map<std::string, double>& params) {
  GeometrySpec g;
  g.kind = kind;
  for (const auto& [key, v] : params) {
    if (key == "L1") g.L1 = v;
    else if (key == "L2") g.L2 = v;
    else if (key == "spin1" || key == "spin") g.spin[0] = static_cast<int>(std::lround(v));
    else if (key == "spin2") g.spin[1] = static_cast<int>(std::lround(v));
    else if (key == "radius") g.radius = v;
    else if (key == "n") g.n = static_cast<int>(std::lround(v));
    else if (key == "rho_in") g.rho_in = v;
    else if (key == "rho_out") g.rho_out = v;
    else if (key == "length") g.length = v;
    else if (key == "circumference") g.circumference = v;
    else if (key == "scale") g.scale = v;
    else throw Error(ErrorKind::Parameter, "unknown geometry parameter '" + key + "'");
  }
  validate(g);
  return g;
}

double GeometricInvariants::meanCurvatureMaxAbs() const {
  double m = 0.0;
  for (const auto& c : boundary) m = std::max(m, std::abs(c.meanCurvature));
  return m;
}

double GeometricInvariants::boundaryIntegralH() const {
  double s = 0.0;
  for (const auto& c : boundary) s += c.meanCurvature * c.area;
  return s;
}

GeometricInvariants invariants(const GeometrySpec& g) {
  validate(g);
  GeometricInvariants inv;
  switch (g.kind) {
    case GeometryKind::FlatTorus2:
      inv.volume = g.len(g.L1) * g.len(g.L2);
      break;
    case GeometryKind::RoundSphere: {
      const double r = g.len(g.radius);
      if (g.n == 2) {
        inv.volume = 4.0 * kPi * r * r;
        inv.scalarCurvature = 2.0 / (r * r);
      } else {
        inv.volume = 2.0 * kPi * kPi * r * r * r;
        inv.scalarCurvature = 6.0 / (r * r);
      }
      break;
    }
    case GeometryKind::UnitDisk: {
      const double r = g.len(g.radius);
      if (g.n == 2) {
        inv.volume = kPi * r * r;
        inv.boundary.push_back({1.0 / r, 2.0 * kPi * r, r, +1});
      } else {
        inv.volume = 4.0 / 3.0 * kPi * r * r * r;
        inv.boundary.push_back({1.0 / r, 4.0 * kPi * r * r, r, +1});
      }
      break;
    }
    case GeometryKind::Annulus: {
      const double ri = g.len(g.rho_in), ro = g.len(g.rho_out);
      inv.volume = kPi * (ro * ro - ri * ri);
      inv.boundary.push_back({-1.0 / ri, 2.0 * kPi * ri, ri, -1});
      inv.boundary.push_back({1.0 / ro, 2.0 * kPi * ro, ro, +1});
      break;
    }
    case GeometryKind::Cylinder: {
      const double L = g.len(g.length), C = g.len(g.circumference);
      const double cross = g.n == 2 ? C : C * C;
      inv.volume = L * cross;
      inv.boundary.push_back({0.0, cross, 0.0, -1});
      inv.boundary.push_back({0.0, cross, L, +1});
      break;
    }
  }
  inv.hasBoundary = !inv.boundary.empty();
  for (const auto& c : inv.boundary) inv.boundaryArea += c.area;
  return inv;
}

GeometrySpec rescale(const GeometrySpec& g, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorKind::Parameter, "rescale factor must be positive");
  GeometrySpec out = g;
  out.scale = g.scale * sigma;
  return out;
}

ReducedDomain reduced_domain(const GeometrySpec& g) {
  validate(g);
  ReducedDomain d;
  switch (g.kind) {
    case GeometryKind::FlatTorus2: {
      const double L2 = g.len(g.L2);
      d.a = 0.0;
      d.b = g.len(g.L1);
      d.left = d.right = EndKind::Periodic;
      d.density = [L2](double) { return L2; };
      break;
    }
    case GeometryKind::RoundSphere: {
      const double r = g.len(g.radius);
      d.a = 0.0;
      d.b = kPi * r;
      d.left = d.right = EndKind::Singular;
      if (g.n == 2)
        d.density = [r](double x) { return 2.0 * kPi * r * std::sin(x / r); };
      else
        d.density = [r](double x) {
          const double s = std::sin(x / r);
          return 4.0 * kPi * r * r * s * s;
        };
      break;
    }
    case GeometryKind::UnitDisk: {
      d.a = 0.0;
      d.b = g.len(g.radius);
      d.left = EndKind::Singular;
      d.right = EndKind::Boundary;
      if (g.n == 2)
        d.density = [](double x) { return 2.0 * kPi * x; };
      else
        d.density = [](double x) { return 4.0 * kPi * x * x; };
      break;
    }
    case GeometryKind::Annulus:
      d.a = g.len(g.rho_in);
      d.b = g.len(g.rho_out);
      d.density = [](double x) { return 2.0 * kPi * x; };
      break;
    case GeometryKind::Cylinder: {
      const double C = g.len(g.circumference);
      const double cross = g.n == 2 ? C : C * C;
      d.a = 0.0;
      d.b = g.len(g.length);
      d.density = [cross](double) { return cross; };
      break;
    }
  }
  return d;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::Resolution, "Gauss rule needs at least one node");
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  return rule;
}

double volume_quadrature(const GeometrySpec& g, int resolution) {
  const ReducedDomain d = reduced_domain(g);
  const GaussRule rule = gauss_legendre(resolution);
  const double half = 0.5 * (d.b - d.a), mid = 0.5 * (d.a + d.b);
  double vol = 0.0;
  for (int i = 0; i < resolution; ++i) vol += rule.w[i] * d.density(mid + half * rule.x[i]);
  return vol * half;
}

DiracBundleSpec rescale(const DiracBundleSpec& b, double sigma) {
  DiracBundleSpec out = b;
  out.geometry = rescale(b.geometry, sigma);
  return out;
}

int torus_flux(const DiracBundleSpec& b) {
  const auto& g = b.geometry;
  const double flux = b.field() * g.len(g.L1) * g.len(g.L2) / (2.0 * kPi);
  const double rounded = std::round(flux);
  if (std::abs(flux - rounded) > 1e-9 * std::max(1.0, std::abs(flux)))
    throw Error(ErrorKind::Parameter, "torus twist flux B*Area/(2*pi) must be an integer");
  return static_cast<int>(rounded);
}

void validate(const DiracBundleSpec& b) {
  validate(b.geometry);
  if (!std::isfinite(b.twist)) throw Error(ErrorKind::Parameter, "twist must be finite");
  if (b.twist == 0.0) return;
  const auto& g = b.geometry;
  if (g.n != 2) throw Error(ErrorKind::Capability, "twists are supported only in dimension 2");
  if (g.kind == GeometryKind::RoundSphere)
    throw Error(ErrorKind::Capability, "twisted bundles over the sphere are not supported");
  if (g.kind == GeometryKind::FlatTorus2) (void)torus_flux(b);
}

}  // namespace db
