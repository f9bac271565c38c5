#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mtx/mesh.hpp"
#include "mtx/params.hpp"

namespace mtx {

// Vertex values of a P1 function on a shared, immutable mesh.
struct GridFunction {
  MeshPtr mesh;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(MeshPtr m, std::vector<double> v);

  bool has_zero_trace() const;
  double max_value() const;
  double min_value() const;
};

GridFunction interpolate(MeshPtr mesh, const std::function<double(Point)>& f);

// Gradient of u on triangle t.
Point triangle_gradient(const GridFunction& u, int t);

// sum_T |grad u|_T|^2 area(T)
double dirichlet_energy(const GridFunction& u);
// Energy outside (or inside) the disk of radius rho about x, with exact
// triangle/disk intersection areas.
double dirichlet_energy_outside(const GridFunction& u, Point x, double rho);
double l2_norm_sq(const GridFunction& u);

GridFunction project_to_unit_ball(const GridFunction& u);

// Area of triangle abc inside the disk of radius r about c0.
double triangle_disk_area(Point a, Point b, Point c, Point c0, double r);

// Quadrature for int (e^{alpha u^2} - 1) |x|^{-beta} on a mesh. Triangles far
// from the origin use the degree-5 rule. Nearer ones are subdivided; pieces
// containing 0 get a polar fan about 0 with Gauss-Jacobi in the radial
// variable, which integrates r^{1-beta} exactly.
class GridQuadrature {
 public:
  GridQuadrature(const DomainMesh& mesh, double beta);

  double value(double alpha, const std::vector<double>& u) const;
  // value(w) - value(u) without cancellation
  double difference(double alpha, const std::vector<double>& u, const std::vector<double>& w) const;
  void gradient(double alpha, const std::vector<double>& u, std::vector<double>& g) const;
  double max_exponent(double alpha, const std::vector<double>& u) const;
  // Restricted to triangles whose three vertices satisfy keep.
  double value_masked(double alpha, const std::vector<double>& u, const std::vector<char>& tri_mask) const;

  struct Node {
    int tri;
    std::array<double, 3> bary;
    double weight;
  };
  const std::vector<Node>& nodes() const { return q_; }

 private:
  const DomainMesh& mesh_;
  std::vector<Node> q_;
};

double eval_F_grid(const Params& p, const GridFunction& u);
// F restricted to {u >= s}, with the indicator sampled at quadrature nodes
double eval_F_grid_above(const Params& p, const GridFunction& u, double s);

// Geometry of the P1 level curve {u = s} about a center point.
struct LevelGeometry {
  int segments = 0;
  double inradius = 0.0, outradius = 0.0;
  double area = 0.0;            // |{u > s}|
  bool touches_boundary = false;  // {u >= s} meets a boundary triangle
};
LevelGeometry level_geometry(const GridFunction& u, double s, Point center);
double eval_J_grid(const GridFunction& u);

// Polar rule on the disk of radius delta about 0 for int f(x) |x|^{-beta}.
double polar_disk_integral(double delta, double beta, const std::function<double(Point)>& f,
                           int n_angle = 64);
// Polar fan rule for int_T f(x) |x|^{-beta} over a single triangle.
double polar_triangle_integral(Point a, Point b, Point c, double beta,
                               const std::function<double(Point)>& f);

}  // namespace mtx
