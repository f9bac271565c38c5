#include "mtx/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace mtx::quad {

Rule1D gauss_jacobi(int n, double gamma) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  if (!(gamma > -1.0)) throw std::invalid_argument("Gauss-Jacobi exponent must exceed -1");
  // Jacobi weight (1-x)^0 (1+x)^gamma on [-1,1], mapped to s = (1+x)/2.
  const double a = 0.0, b = gamma;
  Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
  for (int k = 0; k < n; ++k) {
    double s = 2.0 * k + a + b;
    if (k == 0) {
      diag(k) = (b - a) / (a + b + 2.0);
    } else {
      diag(k) = (b * b - a * a) / (s * (s + 2.0));
    }
    if (k + 1 < n) {
      double m = k + 1.0;
      double t = 2.0 * m + a + b;
      double num = 4.0 * m * (m + a) * (m + b) * (m + a + b);
      double den = t * t * (t + 1.0) * (t - 1.0);
      sub(k) = std::sqrt(num / den);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  if (n == 1) {
    Rule1D r;
    r.x = {0.5 * (1.0 + diag(0))};
    r.w = {1.0 / (gamma + 1.0)};
    return r;
  }
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  // int_0^1 s^gamma ds = 1/(gamma+1)
  double mu0 = 1.0 / (gamma + 1.0);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int k = 0; k < n; ++k) {
    r.x[k] = 0.5 * (1.0 + es.eigenvalues()(k));
    double v = es.eigenvectors()(0, k);
    r.w[k] = mu0 * v * v;
  }
  return r;
}

Rule1D gauss_legendre(int n) { return gauss_jacobi(n, 0.0); }

namespace {
std::mutex cache_mutex;
std::map<std::pair<int, double>, Rule1D>& cache() {
  static std::map<std::pair<int, double>, Rule1D> c;
  return c;
}
}  // namespace

const Rule1D& gauss_jacobi_cached(int n, double gamma) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_pair(n, gamma);
  auto it = cache().find(key);
  if (it == cache().end()) it = cache().emplace(key, gauss_jacobi(n, gamma)).first;
  return it->second;
}

const Rule1D& gauss_legendre_cached(int n) { return gauss_jacobi_cached(n, 0.0); }

const TriangleRule& dunavant5() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0;
    const double b = (6.0 + s15) / 21.0;
    const double wa = (155.0 - s15) / 1200.0;
    const double wb = (155.0 + s15) / 1200.0;
    r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.w.push_back(9.0 / 40.0);
    r.bary.push_back({1.0 - 2.0 * a, a, a});
    r.bary.push_back({a, 1.0 - 2.0 * a, a});
    r.bary.push_back({a, a, 1.0 - 2.0 * a});
    r.w.insert(r.w.end(), 3, wa);
    r.bary.push_back({1.0 - 2.0 * b, b, b});
    r.bary.push_back({b, 1.0 - 2.0 * b, b});
    r.bary.push_back({b, b, 1.0 - 2.0 * b});
    r.w.insert(r.w.end(), 3, wb);
    return r;
  }();
  return rule;
}

}  // namespace mtx::quad
