#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mtx/params.hpp"

namespace mtx {

// Piecewise-linear radial function on [0, R], nodes 0 = r_0 < ... < r_n = R,
// with u(R) = 0. R = 1 unless the profile comes from a rearrangement.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(std::vector<double> nodes, std::vector<double> values);

  static RadialProfile sample(const std::vector<double>& nodes,
                              const std::function<double(double)>& f);

  const std::vector<double>& nodes() const { return r_; }
  const std::vector<double>& values() const { return u_; }
  std::size_t size() const { return r_.size(); }
  double outer_radius() const { return r_.back(); }

  double operator()(double r) const;
  double max_value() const;
  double min_value() const;

  RadialProfile scaled(double c) const;
  bool nonincreasing() const;

 private:
  std::vector<double> r_;
  std::vector<double> u_;
};

enum class GridKind { geometric, uniform };

// n+1 nodes on [0, outer]. The geometric grid puts r_1 = first * outer and
// spaces r_1..r_n logarithmically.
std::vector<double> radial_grid(std::size_t n, GridKind kind = GridKind::geometric,
                                double first = 1e-8, double outer = 1.0);

// int |u'|^2 2 pi r dr, summed cell by cell in closed form.
double dirichlet_energy(const RadialProfile& u);

// Same integral restricted to r >= rho (or r <= rho).
double dirichlet_energy_outside(const RadialProfile& u, double rho);
double dirichlet_energy_inside(const RadialProfile& u, double rho);

// int_{|x| < R} (e^{alpha u^2} - 1) |x|^{-beta} dx with R the outer radius.
double eval_F_radial(const Params& p, const RadialProfile& u);
double eval_J_radial(const RadialProfile& u);

// The same integral over |x| < rho only.
double eval_F_radial_within(const Params& p, const RadialProfile& u, double rho);

// int u^2 2 pi r dr.
double l2_norm_sq(const RadialProfile& u);

RadialProfile project_to_unit_ball(const RadialProfile& u);

// Quadrature table for F on a fixed radial grid. Shared by the evaluator,
// its gradient, and the ascent.
class RadialQuadrature {
 public:
  RadialQuadrature(const std::vector<double>& nodes, double beta, double r_max = -1.0);

  // Sum of w_q * phi(u(r_q)) where phi(v) = e^{alpha v^2} - 1.
  double value(double alpha, const std::vector<double>& u) const;
  // value(w) - value(u) without cancellation
  double difference(double alpha, const std::vector<double>& u, const std::vector<double>& w) const;
  // Gradient of value() with respect to the nodal values.
  void gradient(double alpha, const std::vector<double>& u, std::vector<double>& g) const;
  // Largest alpha u^2 at any quadrature point.
  double max_exponent(double alpha, const std::vector<double>& u) const;

 private:
  struct Node {
    std::size_t cell;
    double lambda;  // position inside the cell, 0 at r_cell
    double weight;  // includes 2 pi r^{1-beta} and the cell length
  };
  std::vector<Node> q_;
};

}  // namespace mtx
