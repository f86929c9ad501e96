#pragma once

// Independent reference values for the tests: Bessel functions, root finders, Fourier counts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

// J_n(z) by its power series; J_{-n} = (-1)^n J_n.
inline cplx bessel_j(int n, cplx z) {
  const int an = std::abs(n);
  cplx term = 1.0;
  for (int k = 1; k <= an; ++k) term *= z / (2.0 * k);
  cplx sum = term;
  const cplx q = -(z * z) / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + an));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return (n < 0 && an % 2) ? -sum : sum;
}

// Real J_n(x) for any sign of n and x from the standard library.
inline double bessel_jr(int n, double x) {
  const int an = std::abs(n);
  double v = std::cyl_bessel_j(static_cast<double>(an), std::abs(x));
  if (x < 0 && an % 2) v = -v;
  if (n < 0 && an % 2) v = -v;
  return v;
}

// Sign changes of f on [lo, hi] refined by bisection.
inline std::vector<double> real_roots(const std::function<double(double)>& f, double lo, double hi,
                                      int samples = 4000) {
  std::vector<double> roots;
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = lo + (hi - lo) * i / samples, f1 = f(x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if (f0 * f1 < 0.0) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b), fm = f(m);
        if (fa * fm <= 0.0) b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

// Newton iteration with a central-difference derivative.
inline cplx newton(const std::function<cplx(cplx)>& f, cplx z) {
  for (int it = 0; it < 100; ++it) {
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    const cplx d = (f(z + h) - f(z - h)) / (2.0 * h);
    const cplx step = f(z) / d;
    z -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

// Least-squares slope of log(err) against log(h).
inline double slope(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Dirac eigenvalue moduli 2 pi |k + delta/2| on the L1 x L2 torus by brute force over |k_i| <= K.
inline std::vector<double> torus_moduli(double L1, double L2, int d1, int d2, int K = 10) {
  std::vector<double> out;
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      const double p1 = 2.0 * kPi * (a + 0.5 * d1) / L1, p2 = 2.0 * kPi * (b + 0.5 * d2) / L2;
      out.push_back(std::hypot(p1, p2));
    }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
