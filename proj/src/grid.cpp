#include "mtx/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtx/quadrature.hpp"

namespace mtx {

namespace {

constexpr int kPolarOrder = 8;
// Triangles at least this many diameters from 0 use the plain degree-5 rule.
constexpr double kFar = 3.0;

// Emits nodes (x, w) for the signed integral over the triangle (0, P, Q) of
// g(x) |x|^{-beta}. The w-direction is bisected until every panel is no longer
// than its distance from the origin, which keeps the complex singularities of
// |x(w)|^{-beta} well outside each panel's Bernstein ellipse.
template <class Emit>
void polar_fan(Point P, Point Q, double beta, Emit emit) {
  double cr = cross(P, Q);
  if (cr == 0.0) return;
  Point d = Q - P;
  double len = norm(d);
  const auto& gs = quad::gauss_jacobi_cached(kPolarOrder, 1.0 - beta);
  const auto& gw = quad::gauss_legendre_cached(kPolarOrder);
  auto panel = [&](double w0, double w1) {
    for (std::size_t iw = 0; iw < gw.x.size(); ++iw) {
      double w = w0 + (w1 - w0) * gw.x[iw];
      Point e = P + w * d;
      double fw = cr * (w1 - w0) * gw.w[iw] * std::pow(norm(e), -beta);
      for (std::size_t is = 0; is < gs.x.size(); ++is) emit(gs.x[is] * e, fw * gs.w[is]);
    }
  };
  struct Span { double w0, w1; int depth; };
  std::vector<Span> stack{{0.0, 1.0, 0}};
  while (!stack.empty()) {
    Span sp = stack.back();
    stack.pop_back();
    double plen = (sp.w1 - sp.w0) * len;
    double dist = distance_to_segment(Point{0.0, 0.0}, P + sp.w0 * d, P + sp.w1 * d);
    if (beta == 0.0 || plen <= dist || sp.depth >= 64) {
      panel(sp.w0, sp.w1);
    } else {
      double m = 0.5 * (sp.w0 + sp.w1);
      stack.push_back({sp.w0, m, sp.depth + 1});
      stack.push_back({m, sp.w1, sp.depth + 1});
    }
  }
}

double dist_to_triangle(Point p, Point a, Point b, Point c) {
  double o1 = cross(b - a, p - a), o2 = cross(c - b, p - b), o3 = cross(a - c, p - c);
  if (o1 >= 0.0 && o2 >= 0.0 && o3 >= 0.0) return 0.0;
  return std::min({distance_to_segment(p, a, b), distance_to_segment(p, b, c), distance_to_segment(p, c, a)});
}

std::array<double, 3> barycentric(Point p, Point a, Point b, Point c) {
  double d = cross(b - a, c - a);
  double l1 = cross(p - a, c - a) / d;
  double l2 = cross(b - a, p - a) / d;
  return {1.0 - l1 - l2, l1, l2};
}

// Signed area of the intersection of triangle (0, p, q) with the disk of radius r about 0.
double fan_disk_area(Point p, Point q, double r) {
  // Split the segment at its intersections with the circle.
  Point d = q - p;
  double a = dot(d, d), b = dot(p, d), c = dot(p, p) - r * r;
  std::vector<double> ts{0.0};
  double disc = b * b - a * c;
  if (disc > 0.0 && a > 0.0) {
    double sq = std::sqrt(disc);
    double t1 = (-b - sq) / a, t2 = (-b + sq) / a;
    if (t1 > 0.0 && t1 < 1.0) ts.push_back(t1);
    if (t2 > 0.0 && t2 < 1.0) ts.push_back(t2);
  }
  ts.push_back(1.0);
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    Point u = p + ts[k] * d, v = p + ts[k + 1] * d;
    Point m = 0.5 * (u + v);
    if (dot(m, m) <= r * r) {
      area += 0.5 * cross(u, v);
    } else {
      area += 0.5 * r * r * std::atan2(cross(u, v), dot(u, v));
    }
  }
  return area;
}

}  // namespace

GridFunction::GridFunction(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw std::invalid_argument("grid function: null mesh");
  if (values.size() != mesh->num_vertices()) throw std::invalid_argument("grid function: value count differs from vertex count");
  for (double x : values) {
    if (!std::isfinite(x)) throw std::invalid_argument("grid function: non-finite value");
  }
}

bool GridFunction::has_zero_trace() const {
  for (int b : mesh->boundary()) {
    if (values[b] != 0.0) return false;
  }
  return true;
}

double GridFunction::max_value() const { return *std::max_element(values.begin(), values.end()); }
double GridFunction::min_value() const { return *std::min_element(values.begin(), values.end()); }

GridFunction interpolate(MeshPtr mesh, const std::function<double(Point)>& f) {
  std::vector<double> v(mesh->num_vertices());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mesh->is_boundary(static_cast<int>(i)) ? 0.0 : f(mesh->vertices()[i]);
  return GridFunction(std::move(mesh), std::move(v));
}

Point triangle_gradient(const GridFunction& u, int t) {
  auto g = u.mesh->shape_gradients(t);
  const auto& tri = u.mesh->triangles()[t];
  Point r{0.0, 0.0};
  for (int k = 0; k < 3; ++k) r = r + u.values[tri[k]] * g[k];
  return r;
}

double dirichlet_energy(const GridFunction& u) {
  double e = 0.0;
  for (std::size_t t = 0; t < u.mesh->num_triangles(); ++t) {
    Point g = triangle_gradient(u, static_cast<int>(t));
    e += dot(g, g) * u.mesh->triangle_area(static_cast<int>(t));
  }
  return e;
}

double triangle_disk_area(Point a, Point b, Point c, Point c0, double r) {
  return std::abs(fan_disk_area(a - c0, b - c0, r) + fan_disk_area(b - c0, c - c0, r) +
                  fan_disk_area(c - c0, a - c0, r));
}

double dirichlet_energy_outside(const GridFunction& u, Point x, double rho) {
  const auto& V = u.mesh->vertices();
  double e = 0.0;
  for (std::size_t t = 0; t < u.mesh->num_triangles(); ++t) {
    const auto& tri = u.mesh->triangles()[t];
    Point g = triangle_gradient(u, static_cast<int>(t));
    double gg = dot(g, g);
    if (gg == 0.0) continue;
    double area = u.mesh->triangle_area(static_cast<int>(t));
    double dmin = dist_to_triangle(x, V[tri[0]], V[tri[1]], V[tri[2]]);
    double dmax = std::max({norm(V[tri[0]] - x), norm(V[tri[1]] - x), norm(V[tri[2]] - x)});
    double out;
    if (dmin >= rho) {
      out = area;
    } else if (dmax <= rho) {
      out = 0.0;
    } else {
      out = std::max(0.0, area - triangle_disk_area(V[tri[0]], V[tri[1]], V[tri[2]], x, rho));
    }
    e += gg * out;
  }
  return e;
}

double l2_norm_sq(const GridFunction& u) {
  const auto& rule = quad::dunavant5();
  double s = 0.0;
  for (std::size_t t = 0; t < u.mesh->num_triangles(); ++t) {
    const auto& tri = u.mesh->triangles()[t];
    double a = u.mesh->triangle_area(static_cast<int>(t));
    for (std::size_t q = 0; q < rule.w.size(); ++q) {
      double v = rule.bary[q][0] * u.values[tri[0]] + rule.bary[q][1] * u.values[tri[1]] + rule.bary[q][2] * u.values[tri[2]];
      s += a * rule.w[q] * v * v;
    }
  }
  return s;
}

GridFunction project_to_unit_ball(const GridFunction& u) {
  double n = std::sqrt(dirichlet_energy(u));
  if (n <= 1.0 + 1e-14) return u;
  GridFunction r = u;
  for (double& v : r.values) v /= n;
  return r;
}

GridQuadrature::GridQuadrature(const DomainMesh& mesh, double beta) : mesh_(mesh) {
  if (beta < 0.0 || !(beta < 2.0)) throw std::invalid_argument("beta must lie in [0, 2)");
  const auto& rule = quad::dunavant5();
  const auto& V = mesh.vertices();
  const Point origin{0.0, 0.0};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    Point a = V[tri[0]], b = V[tri[1]], c = V[tri[2]];
    double area = mesh.triangle_area(static_cast<int>(t));
    double diam = std::max({norm(b - a), norm(c - b), norm(a - c)});
    double dist = beta == 0.0 ? std::numeric_limits<double>::infinity() : dist_to_triangle(origin, a, b, c);
    int ti = static_cast<int>(t);
    if (dist >= kFar * diam) {
      for (std::size_t q = 0; q < rule.w.size(); ++q) {
        const auto& l = rule.bary[q];
        Point x = l[0] * a + l[1] * b + l[2] * c;
        double w = area * rule.w[q];
        if (beta != 0.0) w *= std::pow(norm(x), -beta);
        q_.push_back({ti, l, w});
      }
      continue;
    }
    auto emit = [&](Point x, double w) {
      if (x.x == 0.0 && x.y == 0.0) throw std::runtime_error("quadrature node at the origin");
      q_.push_back({ti, barycentric(x, a, b, c), w});
    };
    // Split into sub-triangles until each is far from 0 relative to its size
    // or (nearly) contains 0, where the fan about 0 stays inside the piece.
    struct Sub { Point p0, p1, p2; };
    std::vector<Sub> stack{{a, b, c}};
    while (!stack.empty()) {
      Sub s = stack.back();
      stack.pop_back();
      double sd = std::max({norm(s.p1 - s.p0), norm(s.p2 - s.p1), norm(s.p0 - s.p2)});
      double sdist = dist_to_triangle(origin, s.p0, s.p1, s.p2);
      if (sdist >= kFar * sd) {
        double sa = 0.5 * cross(s.p1 - s.p0, s.p2 - s.p0);
        for (std::size_t q = 0; q < rule.w.size(); ++q) {
          const auto& l = rule.bary[q];
          Point x = l[0] * s.p0 + l[1] * s.p1 + l[2] * s.p2;
          emit(x, sa * rule.w[q] * std::pow(norm(x), -beta));
        }
      } else if (sdist <= 1e-9 * sd) {
        polar_fan(s.p0, s.p1, beta, emit);
        polar_fan(s.p1, s.p2, beta, emit);
        polar_fan(s.p2, s.p0, beta, emit);
      } else {
        Point m01 = 0.5 * (s.p0 + s.p1), m12 = 0.5 * (s.p1 + s.p2), m20 = 0.5 * (s.p2 + s.p0);
        stack.push_back({s.p0, m01, m20});
        stack.push_back({m01, s.p1, m12});
        stack.push_back({m20, m12, s.p2});
        stack.push_back({m01, m12, m20});
      }
    }
  }
}

double GridQuadrature::value(double alpha, const std::vector<double>& u) const {
  const auto& T = mesh_.triangles();
  double s = 0.0;
  for (const auto& q : q_) {
    const auto& tri = T[q.tri];
    double v = q.bary[0] * u[tri[0]] + q.bary[1] * u[tri[1]] + q.bary[2] * u[tri[2]];
    s += q.weight * std::expm1(alpha * v * v);
  }
  return s;
}

double GridQuadrature::difference(double alpha, const std::vector<double>& u, const std::vector<double>& w) const {
  const auto& T = mesh_.triangles();
  double s = 0.0;
  for (const auto& q : q_) {
    const auto& tri = T[q.tri];
    double a = q.bary[0] * u[tri[0]] + q.bary[1] * u[tri[1]] + q.bary[2] * u[tri[2]];
    double b = q.bary[0] * w[tri[0]] + q.bary[1] * w[tri[1]] + q.bary[2] * w[tri[2]];
    s += q.weight * std::exp(alpha * a * a) * std::expm1(alpha * (b - a) * (b + a));
  }
  return s;
}

double GridQuadrature::value_masked(double alpha, const std::vector<double>& u, const std::vector<char>& mask) const {
  const auto& T = mesh_.triangles();
  double s = 0.0;
  for (const auto& q : q_) {
    if (!mask[q.tri]) continue;
    const auto& tri = T[q.tri];
    double v = q.bary[0] * u[tri[0]] + q.bary[1] * u[tri[1]] + q.bary[2] * u[tri[2]];
    s += q.weight * std::expm1(alpha * v * v);
  }
  return s;
}

void GridQuadrature::gradient(double alpha, const std::vector<double>& u, std::vector<double>& g) const {
  const auto& T = mesh_.triangles();
  g.assign(u.size(), 0.0);
  for (const auto& q : q_) {
    const auto& tri = T[q.tri];
    double v = q.bary[0] * u[tri[0]] + q.bary[1] * u[tri[1]] + q.bary[2] * u[tri[2]];
    double d = q.weight * 2.0 * alpha * v * std::exp(alpha * v * v);
    for (int k = 0; k < 3; ++k) g[tri[k]] += q.bary[k] * d;
  }
}

double GridQuadrature::max_exponent(double alpha, const std::vector<double>& u) const {
  const auto& T = mesh_.triangles();
  double m = 0.0;
  for (const auto& q : q_) {
    const auto& tri = T[q.tri];
    double v = q.bary[0] * u[tri[0]] + q.bary[1] * u[tri[1]] + q.bary[2] * u[tri[2]];
    m = std::max(m, alpha * v * v);
  }
  return m;
}

double eval_F_grid(const Params& p, const GridFunction& u) {
  GridQuadrature q(*u.mesh, p.beta);
  return q.value(p.alpha, u.values);
}

double eval_F_grid_above(const Params& p, const GridFunction& u, double s) {
  GridQuadrature q(*u.mesh, p.beta);
  const auto& T = u.mesh->triangles();
  double r = 0.0;
  for (const auto& n : q.nodes()) {
    const auto& tri = T[n.tri];
    double v = n.bary[0] * u.values[tri[0]] + n.bary[1] * u.values[tri[1]] + n.bary[2] * u.values[tri[2]];
    if (v >= s) r += n.weight * std::expm1(p.alpha * v * v);
  }
  return r;
}

LevelGeometry level_geometry(const GridFunction& u, double s, Point center) {
  const auto& M = *u.mesh;
  const auto& V = M.vertices();
  LevelGeometry g;
  g.inradius = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < M.num_triangles(); ++k) {
    const auto& tri = M.triangles()[k];
    std::vector<Point> above, cut;
    bool any_up = false, on_bdry = false;
    for (int e = 0; e < 3; ++e) {
      int i = tri[e], j = tri[(e + 1) % 3];
      double ui = u.values[i], uj = u.values[j];
      on_bdry |= M.is_boundary(i);
      if (ui >= s) any_up = true;
      if (ui > s) above.push_back(V[i]);
      if ((ui > s) != (uj > s)) {
        Point x = V[i] + ((s - ui) / (uj - ui)) * (V[j] - V[i]);
        above.push_back(x);
        cut.push_back(x);
      }
    }
    if (any_up && on_bdry) g.touches_boundary = true;
    if (above.size() >= 3) g.area += polygon_area(above);
    if (cut.size() == 2) {
      ++g.segments;
      g.inradius = std::min(g.inradius, distance_to_segment(center, cut[0], cut[1]));
      g.outradius = std::max({g.outradius, norm(cut[0] - center), norm(cut[1] - center)});
    }
  }
  if (g.segments == 0) g.inradius = 0.0;
  return g;
}

double eval_J_grid(const GridFunction& u) {
  GridQuadrature q(*u.mesh, 0.0);
  return q.value(4.0 * kPi, u.values);
}

double polar_disk_integral(double delta, double beta, const std::function<double(Point)>& f, int n_angle) {
  if (beta < 0.0 || !(beta < 2.0)) throw std::invalid_argument("beta must lie in [0, 2)");
  const auto& gs = quad::gauss_jacobi_cached(kPolarOrder, 1.0 - beta);
  double s = 0.0;
  double scale = std::pow(delta, 2.0 - beta) * 2.0 * kPi / n_angle;
  for (int k = 0; k < n_angle; ++k) {
    double th = 2.0 * kPi * (k + 0.5) / n_angle;
    Point e{delta * std::cos(th), delta * std::sin(th)};
    for (std::size_t i = 0; i < gs.x.size(); ++i) s += scale * gs.w[i] * f(gs.x[i] * e);
  }
  return s;
}

double polar_triangle_integral(Point a, Point b, Point c, double beta, const std::function<double(Point)>& f) {
  double s = 0.0;
  auto emit = [&](Point x, double w) { s += w * f(x); };
  double orient = cross(b - a, c - a);
  if (orient < 0.0) std::swap(b, c);
  polar_fan(a, b, beta, emit);
  polar_fan(b, c, beta, emit);
  polar_fan(c, a, beta, emit);
  return s;
}

}  // namespace mtx
