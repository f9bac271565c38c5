#pragma once

#include <vector>

#include "mtx/grid.hpp"
#include "mtx/mesh.hpp"
#include "mtx/params.hpp"

namespace mtx {

// -(1/2pi) log|x - y|
double log_kernel(Point x, Point y);

// G = Phi - H with the singular part Phi kept analytic and H the P1 solution
// of the Laplace problem with boundary data Phi.
struct GreensField {
  MeshPtr mesh;
  Point pole;
  std::vector<double> H;
  double H_at_pole = 0.0;
  double incenter = 0.0;
  int pole_vertex = -1;   // vertex sitting on the pole, if any
  int pole_triangle = -1;
  double residual = 0.0;  // max discrete-Laplace residual of H
  double min_G = 0.0;     // min of G over interior vertices
  double max_G = 0.0;     // max of G over vertices other than the pole

  // G at vertex v (+inf at the pole vertex)
  double G(int v) const;
  // exact grad Phi minus grad H on triangle t
  Point grad_G(int t, Point y) const;
  GridFunction G_values() const;  // pole vertex clamped to the largest finite value
};

GreensField solve_greens(MeshPtr mesh, Point pole);
double conformal_incenter(const GreensField& field);

struct LevelSet {
  double t = 0.0;
  std::vector<std::vector<Point>> polylines;  // closed, {G > t} on the left
  double enclosed_area = 0.0;
  double inradius = 0.0, outradius = 0.0;     // about the pole
  double tau = 0.0, sigma = 0.0;
  int segments = 0;
};

LevelSet level_set(const GreensField& field, double t);
double greens_energy_below(const GreensField& field, double t);
// |{G > t}| / (pi I^2 e^{-4 pi t}); throws when the level curve has fewer
// than min_segments pieces.
double level_mass_ratio(const GreensField& field, double t, int min_segments = 32);
// int_{G = t} -dG/dn dsigma with n the outward normal of {G > t}
double level_flux(const GreensField& field, double t);

// Harmonic function on the region between a hole and the outer boundary.
// hole_vertices/hole_values fix the hole (its closure); outer_values holds one
// value per entry of mesh->boundary().
GridFunction harmonic_extension(MeshPtr mesh, const std::vector<int>& hole_vertices,
                                const std::vector<double>& hole_values, const std::vector<double>& outer_values);

struct BoundaryBound {
  double lhs = 0.0;
  double rhs = 0.0;
};
BoundaryBound weighted_boundary_functional(const GreensField& field, const Params& p);

}  // namespace mtx
