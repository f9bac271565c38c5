#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace mtx {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

using Polygon = std::vector<Point>;  // counter-clockwise, not closed

double polygon_area(const Polygon& poly);
double distance_to_segment(Point p, Point a, Point b);
double distance_to_polygon(Point p, const Polygon& poly);
// +1 inside, 0 on the boundary (within tol), -1 outside.
int point_in_polygon(Point p, const Polygon& poly, double tol = 1e-12);

enum class OriginLocation { interior, boundary, exterior };
const char* to_string(OriginLocation loc);

class DomainMesh {
 public:
  DomainMesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
             std::vector<int> boundary);

  const std::vector<Point>& vertices() const { return v_; }
  const std::vector<std::array<int, 3>>& triangles() const { return t_; }
  // Ordered counter-clockwise loop.
  const std::vector<int>& boundary() const { return b_; }
  bool is_boundary(int v) const { return on_b_[v]; }
  OriginLocation origin_location() const { return origin_; }
  double diameter() const { return diam_; }
  double area() const { return area_; }
  double triangle_area(int t) const { return tri_area_[t]; }
  const std::vector<double>& lumped_mass() const { return lumped_; }
  Polygon boundary_polygon() const;
  std::size_t num_vertices() const { return v_.size(); }
  std::size_t num_triangles() const { return t_.size(); }

  // Gradients of the three barycentric coordinates of triangle t.
  std::array<Point, 3> shape_gradients(int t) const;
  // Index of a triangle containing p and barycentric coordinates, or -1.
  int locate(Point p, std::array<double, 3>* bary = nullptr) const;

  DomainMesh translated(Point d) const;

 private:
  std::vector<Point> v_;
  std::vector<std::array<int, 3>> t_;
  std::vector<int> b_;
  std::vector<char> on_b_;
  std::vector<double> tri_area_;
  std::vector<double> lumped_;
  OriginLocation origin_ = OriginLocation::exterior;
  double diam_ = 0.0;
  double area_ = 0.0;
};

using MeshPtr = std::shared_ptr<const DomainMesh>;

// Reference polygons.
Polygon disk_polygon(double radius, Point center, int n);
Polygon rectangle_polygon(double x0, double y0, double x1, double y1);
Polygon square_polygon(double half);
// (-1,1)^2 with the corner [0.5,1]^2 removed.
Polygon l_hexagon_polygon();

// Triangulation of a polygon that is star-shaped about center: the center is
// joined to every polygon vertex and each sector is split uniformly into
// levels^2 triangles.
DomainMesh make_fan_mesh(const Polygon& poly, Point center, int levels);

struct GradedMeshOptions {
  double h = 0.02;            // target spacing away from the center
  int ring_mid = 128;         // nodes per ring in the geometric zone
  int ring_deep = 64;         // nodes per ring close to the center
  double mid_radius = 1e-3;   // relative to the distance from center to boundary
  double inner_radius = 1e-8; // relative to the distance from center to boundary
  double corner_angle = 10.0; // boundary turns above this (degrees) are kept as nodes
};

// Delaunay mesh of a point cloud graded toward pole (spacing min(h, 2 pi r /
// ring_mid) at distance r), with concentric rings in a disk about the pole
// down to inner_radius. The pole becomes a mesh vertex.
DomainMesh make_pole_mesh(const Polygon& poly, Point pole, const GradedMeshOptions& opts = {});

// Disk of the given radius and center, graded toward pole; boundary nodes lie
// exactly on the circle.
DomainMesh make_disk_mesh(double radius, Point disk_center, Point pole, const GradedMeshOptions& opts = {});

}  // namespace mtx
