#include "mtx/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtx/quadrature.hpp"

namespace mtx {

namespace {

constexpr int kCellOrder = 8;

double cell_energy(double r0, double r1, double du) {
  return kPi * du * du * (r1 + r0) / (r1 - r0);
}

}  // namespace

RadialProfile::RadialProfile(std::vector<double> nodes, std::vector<double> values)
    : r_(std::move(nodes)), u_(std::move(values)) {
  if (r_.size() != u_.size()) throw std::invalid_argument("profile: nodes and values differ in length");
  if (r_.size() < 3) throw std::invalid_argument("profile: need at least three nodes");
  if (r_.front() != 0.0) throw std::invalid_argument("profile: first node must be 0");
  for (std::size_t i = 1; i < r_.size(); ++i) {
    if (!(r_[i] > r_[i - 1])) throw std::invalid_argument("profile: nodes must be strictly increasing");
  }
  for (double v : u_) {
    if (!std::isfinite(v)) throw std::invalid_argument("profile: non-finite value");
  }
  if (!std::isfinite(r_.back())) throw std::invalid_argument("profile: non-finite outer radius");
  if (u_.back() != 0.0) throw std::invalid_argument("profile: value at the outer radius must be 0");
}

RadialProfile RadialProfile::sample(const std::vector<double>& nodes,
                                    const std::function<double(double)>& f) {
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) v[i] = f(nodes[i]);
  if (!v.empty()) v.back() = 0.0;
  return RadialProfile(nodes, std::move(v));
}

double RadialProfile::operator()(double r) const {
  if (r <= 0.0) return u_.front();
  if (r >= r_.back()) return 0.0;
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - r_.begin()) - 1;
  double lam = (r - r_[i]) / (r_[i + 1] - r_[i]);
  return (1.0 - lam) * u_[i] + lam * u_[i + 1];
}

double RadialProfile::max_value() const { return *std::max_element(u_.begin(), u_.end()); }
double RadialProfile::min_value() const { return *std::min_element(u_.begin(), u_.end()); }

RadialProfile RadialProfile::scaled(double c) const {
  std::vector<double> v(u_);
  for (double& x : v) x *= c;
  return RadialProfile(r_, std::move(v));
}

bool RadialProfile::nonincreasing() const {
  for (std::size_t i = 1; i < u_.size(); ++i) {
    if (u_[i] > u_[i - 1]) return false;
  }
  return true;
}

std::vector<double> radial_grid(std::size_t n, GridKind kind, double first, double outer) {
  if (n < 2) throw std::invalid_argument("radial grid: need n >= 2 cells");
  if (!(outer > 0.0)) throw std::invalid_argument("radial grid: outer radius must be positive");
  std::vector<double> r(n + 1);
  r[0] = 0.0;
  if (kind == GridKind::uniform) {
    for (std::size_t k = 1; k <= n; ++k) r[k] = outer * static_cast<double>(k) / static_cast<double>(n);
  } else {
    if (!(first > 0.0 && first < 1.0)) throw std::invalid_argument("radial grid: first node ratio must lie in (0,1)");
    double lf = std::log(first);
    for (std::size_t k = 1; k <= n; ++k) {
      double e = static_cast<double>(n - k) / static_cast<double>(n - 1);
      r[k] = outer * std::exp(lf * e);
    }
  }
  r[n] = outer;
  return r;
}

double dirichlet_energy(const RadialProfile& u) {
  const auto& r = u.nodes();
  const auto& v = u.values();
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) e += cell_energy(r[i], r[i + 1], v[i + 1] - v[i]);
  return e;
}

double dirichlet_energy_outside(const RadialProfile& u, double rho) {
  const auto& r = u.nodes();
  const auto& v = u.values();
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (r[i + 1] <= rho) continue;
    double du = v[i + 1] - v[i];
    if (r[i] >= rho) {
      e += cell_energy(r[i], r[i + 1], du);
    } else {
      double g = du / (r[i + 1] - r[i]);
      e += kPi * g * g * (r[i + 1] * r[i + 1] - rho * rho);
    }
  }
  return e;
}

double dirichlet_energy_inside(const RadialProfile& u, double rho) {
  return dirichlet_energy(u) - dirichlet_energy_outside(u, rho);
}

RadialQuadrature::RadialQuadrature(const std::vector<double>& r, double beta, double r_max) {
  if (!(beta < 2.0) || beta < 0.0) throw std::invalid_argument("beta must lie in [0, 2)");
  if (r_max < 0.0) r_max = r.back();
  const auto& gl = quad::gauss_legendre_cached(kCellOrder);
  const auto& gj = quad::gauss_jacobi_cached(kCellOrder, 1.0 - beta);
  for (std::size_t c = 0; c + 1 < r.size(); ++c) {
    double r0 = r[c], r1 = r[c + 1];
    if (r0 >= r_max) break;
    double top = std::min(r1, r_max);
    double dr = r1 - r0;
    if (r0 == 0.0) {
      // int_0^top phi r^{1-beta} dr = top^{2-beta} int_0^1 phi(top s) s^{1-beta} ds
      double scale = 2.0 * kPi * std::pow(top, 2.0 - beta);
      for (std::size_t k = 0; k < gj.x.size(); ++k) {
        q_.push_back({c, gj.x[k] * top / dr, scale * gj.w[k]});
      }
    } else {
      double len = top - r0;
      for (std::size_t k = 0; k < gl.x.size(); ++k) {
        double rr = r0 + gl.x[k] * len;
        q_.push_back({c, (rr - r0) / dr, 2.0 * kPi * std::pow(rr, 1.0 - beta) * len * gl.w[k]});
      }
    }
  }
}

double RadialQuadrature::value(double alpha, const std::vector<double>& u) const {
  double s = 0.0;
  for (const auto& q : q_) {
    double v = (1.0 - q.lambda) * u[q.cell] + q.lambda * u[q.cell + 1];
    s += q.weight * std::expm1(alpha * v * v);
  }
  return s;
}

double RadialQuadrature::difference(double alpha, const std::vector<double>& u, const std::vector<double>& w) const {
  double s = 0.0;
  for (const auto& q : q_) {
    double a = (1.0 - q.lambda) * u[q.cell] + q.lambda * u[q.cell + 1];
    double b = (1.0 - q.lambda) * w[q.cell] + q.lambda * w[q.cell + 1];
    s += q.weight * std::exp(alpha * a * a) * std::expm1(alpha * (b - a) * (b + a));
  }
  return s;
}

void RadialQuadrature::gradient(double alpha, const std::vector<double>& u, std::vector<double>& g) const {
  g.assign(u.size(), 0.0);
  for (const auto& q : q_) {
    double v = (1.0 - q.lambda) * u[q.cell] + q.lambda * u[q.cell + 1];
    double d = q.weight * 2.0 * alpha * v * std::exp(alpha * v * v);
    g[q.cell] += (1.0 - q.lambda) * d;
    g[q.cell + 1] += q.lambda * d;
  }
}

double RadialQuadrature::max_exponent(double alpha, const std::vector<double>& u) const {
  double m = 0.0;
  for (const auto& q : q_) {
    double v = (1.0 - q.lambda) * u[q.cell] + q.lambda * u[q.cell + 1];
    m = std::max(m, alpha * v * v);
  }
  return m;
}

double eval_F_radial(const Params& p, const RadialProfile& u) {
  RadialQuadrature q(u.nodes(), p.beta);
  return q.value(p.alpha, u.values());
}

double eval_J_radial(const RadialProfile& u) {
  Params p;
  p.alpha = 4.0 * kPi;
  p.beta = 0.0;
  return eval_F_radial(p, u);
}

double eval_F_radial_within(const Params& p, const RadialProfile& u, double rho) {
  if (!(rho > 0.0)) return 0.0;
  RadialQuadrature q(u.nodes(), p.beta, std::min(rho, u.outer_radius()));
  return q.value(p.alpha, u.values());
}

double l2_norm_sq(const RadialProfile& u) {
  const auto& gl = quad::gauss_legendre_cached(3);
  const auto& r = u.nodes();
  const auto& v = u.values();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    double dr = r[i + 1] - r[i];
    for (std::size_t k = 0; k < gl.x.size(); ++k) {
      double lam = gl.x[k];
      double val = (1.0 - lam) * v[i] + lam * v[i + 1];
      s += gl.w[k] * dr * val * val * 2.0 * kPi * (r[i] + lam * dr);
    }
  }
  return s;
}

RadialProfile project_to_unit_ball(const RadialProfile& u) {
  double n = std::sqrt(dirichlet_energy(u));
  if (n <= 1.0 + 1e-14) return u;
  return u.scaled(1.0 / n);
}

}  // namespace mtx
