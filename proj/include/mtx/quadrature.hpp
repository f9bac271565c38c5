#pragma once

#include <array>
#include <vector>

namespace mtx::quad {

// Nodes and weights on [0,1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

Rule1D gauss_legendre(int n);

// Gauss rule for the weight s^gamma on [0,1], gamma > -1 (Golub-Welsch).
Rule1D gauss_jacobi(int n, double gamma);

// Cached variants; the returned reference stays valid for the program lifetime.
const Rule1D& gauss_legendre_cached(int n);
const Rule1D& gauss_jacobi_cached(int n, double gamma);

// Symmetric rule on the reference triangle; weights sum to 1.
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;
};

// Seven-point rule, exact for polynomials of degree 5.
const TriangleRule& dunavant5();

}  // namespace mtx::quad
