#pragma once

// Reference computations used by the tests. None of them calls the library.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

constexpr double pi = std::numbers::pi;

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson with Richardson correction.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13, int depth = 50) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// int_0^1 (e^{c s^2} - 1) ds from the power series.
inline double gauss_moment(double c) {
  double term = 1.0, sum = 0.0;
  for (int k = 1; k < 400; ++k) {
    term *= c / k;
    double add = term / (2 * k + 1);
    sum += add;
    if (add < 1e-18 * sum) break;
  }
  return sum;
}

// J(m_eps) for the continuum Moser function, L = log(1/eps):
// pi (1 - eps^2) from the plateau plus 2 pi int_0^L (e^{2 s^2 / L} - 1) e^{-2 s} ds.
inline double moser_J(double L) {
  auto f = [L](double s) { return std::exp(2.0 * s * s / L - 2.0 * s) - std::exp(-2.0 * s); };
  return pi * (1.0 - std::exp(-2.0 * L)) + 2.0 * pi * integrate(f, 0.0, L, 1e-14);
}

// Conformal radius of the square (-1,1)^2 at its center, from the
// Schwarz-Christoffel map of the disk: sqrt(2) / int_0^1 (1 - t^4)^{-1/2} dt.
inline double square_incenter() { return 8.0 * std::sqrt(pi) / std::pow(std::tgamma(0.25), 2); }

}  // namespace oracle
