#include "mtx/greens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "mtx/fem.hpp"
#include "mtx/quadrature.hpp"

namespace mtx {

double log_kernel(Point x, Point y) { return -std::log(norm(x - y)) / (2.0 * kPi); }

double GreensField::G(int v) const {
  if (v == pole_vertex) return std::numeric_limits<double>::infinity();
  return log_kernel(pole, mesh->vertices()[v]) - H[v];
}

Point GreensField::grad_G(int t, Point y) const {
  auto g = mesh->shape_gradients(t);
  const auto& tri = mesh->triangles()[t];
  Point gh = H[tri[0]] * g[0] + H[tri[1]] * g[1] + H[tri[2]] * g[2];
  Point d = y - pole;
  Point gphi = (-1.0 / (2.0 * kPi * dot(d, d))) * d;
  return gphi - gh;
}

GridFunction GreensField::G_values() const {
  std::vector<double> v(mesh->num_vertices());
  double mx = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = G(static_cast<int>(i));
    if (std::isfinite(v[i])) mx = std::max(mx, v[i]);
  }
  for (double& x : v) {
    if (!std::isfinite(x)) x = mx;
  }
  for (int b : mesh->boundary()) v[b] = 0.0;
  return GridFunction(mesh, std::move(v));
}

GreensField solve_greens(MeshPtr mesh, Point pole) {
  if (!mesh) throw std::invalid_argument("greens: null mesh");
  const auto& V = mesh->vertices();
  auto poly = mesh->boundary_polygon();
  if (point_in_polygon(pole, poly, 1e-12 * mesh->diameter()) <= 0) throw std::invalid_argument("greens: pole must lie strictly inside the domain");
  std::array<double, 3> bary{};
  int tp = mesh->locate(pole, &bary);
  if (tp < 0) throw std::invalid_argument("greens: pole not covered by the mesh");
  const auto& tri = mesh->triangles()[tp];
  double cell = std::max({norm(V[tri[1]] - V[tri[0]]), norm(V[tri[2]] - V[tri[1]]), norm(V[tri[0]] - V[tri[2]])});
  double dist = distance_to_polygon(pole, poly);
  if (dist <= 2.0 * cell) {
    throw std::invalid_argument("greens: pole within two mesh cells of the boundary (distance " + std::to_string(dist) +
                                ", cell " + std::to_string(cell) + ")");
  }
  GreensField f;
  f.mesh = mesh;
  f.pole = pole;
  f.pole_triangle = tp;
  for (int k = 0; k < 3; ++k) {
    if (norm(V[tri[k]] - pole) <= 1e-14 * mesh->diameter()) f.pole_vertex = tri[k];
  }
  auto K = assemble_stiffness(*mesh);
  auto solver = interior_solver(*mesh, K);
  std::vector<double> bc(mesh->num_vertices(), 0.0);
  for (int b : mesh->boundary()) bc[b] = log_kernel(pole, V[b]);
  f.H = solver.solve({}, bc);
  f.residual = solver.residual(f.H, {});
  f.H_at_pole = bary[0] * f.H[tri[0]] + bary[1] * f.H[tri[1]] + bary[2] * f.H[tri[2]];
  f.incenter = std::exp(-2.0 * kPi * f.H_at_pole);
  f.min_G = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh->num_vertices(); ++i) {
    double g = f.G(static_cast<int>(i));
    if (!mesh->is_boundary(static_cast<int>(i))) f.min_G = std::min(f.min_G, g);
    if (std::isfinite(g)) f.max_G = std::max(f.max_G, g);
  }
  return f;
}

double conformal_incenter(const GreensField& field) { return field.incenter; }

namespace {

// Crossing of {G = t} on edge (a, b) with G(a) > t >= G(b). Phi is exact along
// the edge and H linear, so the root is found by bisection on the exact trace.
Point edge_crossing(const GreensField& f, int a, int b, double t) {
  const auto& V = f.mesh->vertices();
  Point pa = V[a], pb = V[b];
  double ha = f.H[a], hb = f.H[b];
  double lo = 0.0, hi = 1.0;  // G(lo) > t, G(hi) <= t
  for (int it = 0; it < 80; ++it) {
    double m = 0.5 * (lo + hi);
    Point y = pa + m * (pb - pa);
    double g = (norm(y - f.pole) == 0.0) ? std::numeric_limits<double>::infinity()
                                        : log_kernel(f.pole, y) - ((1.0 - m) * ha + m * hb);
    if (g > t) {
      lo = m;
    } else {
      hi = m;
    }
    if (hi - lo < 1e-17) break;
  }
  double s = 0.5 * (lo + hi);
  return pa + s * (pb - pa);
}

struct Cut {
  // parts of a triangle above / below the level, as CCW polygons
  std::vector<Point> above, below;
  bool has_segment = false;
  Point from, to;  // {G > t} on the left
  std::pair<int, int> from_edge, to_edge;
  // area between the chord and the level curve, signed so that adding it to
  // the above polygon gives a parabolic (fourth order) area estimate
  double sagitta_area = 0.0;
};

// G restricted to triangle t with H extended linearly
double G_on_triangle(const GreensField& f, int t, Point y) {
  const auto& V = f.mesh->vertices();
  const auto& tri = f.mesh->triangles()[t];
  Point a = V[tri[0]], b = V[tri[1]], c = V[tri[2]];
  double d = cross(b - a, c - a);
  double l1 = cross(y - a, c - a) / d, l2 = cross(b - a, y - a) / d;
  double h = (1.0 - l1 - l2) * f.H[tri[0]] + l1 * f.H[tri[1]] + l2 * f.H[tri[2]];
  return log_kernel(f.pole, y) - h;
}

double sagitta_area(const GreensField& f, int t, Point from, Point to, double level) {
  Point d = to - from;
  double len = norm(d);
  if (len == 0.0) return 0.0;
  Point n{-d.y / len, d.x / len};  // toward {G > t}
  Point m = 0.5 * (from + to);
  double lo = -0.5 * len, hi = 0.5 * len;
  if (!(G_on_triangle(f, t, m + lo * n) <= level && G_on_triangle(f, t, m + hi * n) > level)) return 0.0;
  for (int it = 0; it < 60; ++it) {
    double s = 0.5 * (lo + hi);
    if (G_on_triangle(f, t, m + s * n) > level) {
      hi = s;
    } else {
      lo = s;
    }
  }
  return -(2.0 / 3.0) * len * 0.5 * (lo + hi);
}

std::pair<int, int> ekey(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

Cut cut_triangle(const GreensField& f, int t, double level) {
  const auto& V = f.mesh->vertices();
  const auto& tri = f.mesh->triangles()[t];
  bool up[3];
  int nup = 0;
  for (int k = 0; k < 3; ++k) {
    up[k] = f.G(tri[k]) > level;
    nup += up[k];
  }
  Cut c;
  if (nup == 0) {
    c.below = {V[tri[0]], V[tri[1]], V[tri[2]]};
    return c;
  }
  if (nup == 3) {
    c.above = {V[tri[0]], V[tri[1]], V[tri[2]]};
    return c;
  }
  // walk the triangle CCW and split at crossings
  c.has_segment = true;
  for (int k = 0; k < 3; ++k) {
    int a = tri[k], b = tri[(k + 1) % 3];
    (up[k] ? c.above : c.below).push_back(V[a]);
    if (up[k] != up[(k + 1) % 3]) {
      Point x = up[k] ? edge_crossing(f, a, b, level) : edge_crossing(f, b, a, level);
      c.above.push_back(x);
      c.below.push_back(x);
      if (up[k]) {
        c.from = x;
        c.from_edge = ekey(a, b);
      } else {
        c.to = x;
        c.to_edge = ekey(a, b);
      }
    }
  }
  c.sagitta_area = sagitta_area(f, t, c.from, c.to, level);
  return c;
}

void check_level(const GreensField& f, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("level must be positive and finite");
  if (t >= f.max_G) throw std::invalid_argument("level set is empty: t exceeds max G on the mesh");
}

// int over a convex polygon of |grad G|^2 on triangle tri
double energy_on_polygon(const GreensField& f, int tri, const std::vector<Point>& poly) {
  if (poly.size() < 3) return 0.0;
  const auto& rule = quad::dunavant5();
  double s = 0.0;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    Point a = poly[0], b = poly[k], c = poly[k + 1];
    double area = 0.5 * cross(b - a, c - a);
    for (std::size_t q = 0; q < rule.w.size(); ++q) {
      const auto& l = rule.bary[q];
      Point y = l[0] * a + l[1] * b + l[2] * c;
      Point g = f.grad_G(tri, y);
      s += area * rule.w[q] * dot(g, g);
    }
  }
  return s;
}

}  // namespace

LevelSet level_set(const GreensField& f, double t) {
  check_level(f, t);
  const auto& M = *f.mesh;
  LevelSet ls;
  ls.t = t;
  std::map<std::pair<int, int>, std::pair<Point, std::pair<int, int>>> next;  // from_edge -> (from point, to_edge)
  for (std::size_t k = 0; k < M.num_triangles(); ++k) {
    Cut c = cut_triangle(f, static_cast<int>(k), t);
    ls.enclosed_area += polygon_area(c.above) + c.sagitta_area;
    if (c.has_segment) {
      next[c.from_edge] = {c.from, c.to_edge};
      ++ls.segments;
    }
  }
  if (ls.segments == 0) throw std::invalid_argument("level set is empty: t exceeds max G on the mesh");
  // chain segments into closed curves
  while (!next.empty()) {
    auto start = next.begin()->first;
    std::vector<Point> curve;
    auto key = start;
    while (true) {
      auto it = next.find(key);
      if (it == next.end()) break;
      curve.push_back(it->second.first);
      auto to = it->second.second;
      next.erase(it);
      key = to;
      if (key == start) break;
    }
    ls.polylines.push_back(std::move(curve));
  }
  ls.inradius = std::numeric_limits<double>::infinity();
  ls.outradius = 0.0;
  for (const auto& c : ls.polylines) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      Point a = c[i], b = c[(i + 1) % c.size()];
      ls.inradius = std::min(ls.inradius, distance_to_segment(f.pole, a, b));
      ls.outradius = std::max(ls.outradius, norm(a - f.pole));
    }
  }
  ls.tau = f.incenter * std::exp(-2.0 * kPi * t);
  ls.sigma = std::max(std::abs(ls.inradius - ls.tau), std::abs(ls.outradius - ls.tau));
  return ls;
}

double greens_energy_below(const GreensField& f, double t) {
  check_level(f, t);
  const auto& M = *f.mesh;
  double e = 0.0;
  for (std::size_t k = 0; k < M.num_triangles(); ++k) {
    int ti = static_cast<int>(k);
    Cut c = cut_triangle(f, ti, t);
    if (c.below.empty()) continue;
    if (ti == f.pole_triangle && f.pole_vertex < 0) {
      throw std::runtime_error("greens energy: level reaches the triangle holding the pole; mesh the pole as a vertex");
    }
    e += energy_on_polygon(f, ti, c.below);
  }
  return e;
}

double level_mass_ratio(const GreensField& f, double t, int min_segments) {
  LevelSet ls = level_set(f, t);
  if (ls.segments < min_segments) {
    throw std::runtime_error("level set under-resolved: " + std::to_string(ls.segments) + " segments at t = " + std::to_string(t));
  }
  return ls.enclosed_area / (kPi * f.incenter * f.incenter * std::exp(-4.0 * kPi * t));
}

double level_flux(const GreensField& f, double t) {
  check_level(f, t);
  const auto& M = *f.mesh;
  const auto& gl = quad::gauss_legendre_cached(4);
  double flux = 0.0;
  for (std::size_t k = 0; k < M.num_triangles(); ++k) {
    int ti = static_cast<int>(k);
    Cut c = cut_triangle(f, ti, t);
    if (!c.has_segment) continue;
    Point d = c.to - c.from;
    // {G > t} on the left, so the outward normal of that set points right
    Point n_out{d.y, -d.x};
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
      Point y = c.from + gl.x[q] * d;
      flux -= gl.w[q] * dot(f.grad_G(ti, y), n_out);
    }
  }
  return flux;
}

GridFunction harmonic_extension(MeshPtr mesh, const std::vector<int>& hole_vertices, const std::vector<double>& hole_values,
                                const std::vector<double>& outer_values) {
  if (!mesh) throw std::invalid_argument("harmonic extension: null mesh");
  const std::size_t n = mesh->num_vertices();
  if (hole_vertices.size() != hole_values.size()) throw std::invalid_argument("harmonic extension: hole data size mismatch");
  if (outer_values.size() != mesh->boundary().size()) throw std::invalid_argument("harmonic extension: one outer value per boundary vertex");
  std::vector<char> fixed(n, 0);
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < mesh->boundary().size(); ++k) {
    fixed[mesh->boundary()[k]] = 1;
    x[mesh->boundary()[k]] = outer_values[k];
  }
  for (std::size_t k = 0; k < hole_vertices.size(); ++k) {
    int v = hole_vertices[k];
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("harmonic extension: hole vertex out of range");
    if (mesh->is_boundary(v)) throw std::invalid_argument("harmonic extension: hole touches the outer boundary");
    if (!std::isfinite(hole_values[k])) throw std::invalid_argument("harmonic extension: non-finite hole value");
    fixed[v] = 1;
    x[v] = hole_values[k];
  }
  for (double v : outer_values) {
    if (!std::isfinite(v)) throw std::invalid_argument("harmonic extension: non-finite boundary value");
  }
  // the free region must be one connected annulus
  std::vector<std::vector<int>> adj(n);
  for (const auto& t : mesh->triangles()) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (!fixed[a] && !fixed[b]) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
  }
  std::vector<char> seen(n, 0);
  int comps = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (fixed[s] || seen[s]) continue;
    ++comps;
    std::queue<int> q;
    q.push(static_cast<int>(s));
    seen[s] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
      }
    }
  }
  if (comps != 1) throw std::invalid_argument("harmonic extension: region between hole and boundary is disconnected (" + std::to_string(comps) + " components)");
  auto K = assemble_stiffness(*mesh);
  DirichletSolver solver(K, fixed);
  return GridFunction(mesh, solver.solve({}, x));
}

BoundaryBound weighted_boundary_functional(const GreensField& f, const Params& p) {
  const auto& M = *f.mesh;
  if (M.origin_location() != OriginLocation::interior) throw std::invalid_argument("weighted boundary bound needs 0 inside the domain");
  const auto& V = M.vertices();
  const auto& B = M.boundary();
  const std::size_t nb = B.size();
  std::unordered_map<int, int> pos;
  for (std::size_t k = 0; k < nb; ++k) pos[B[k]] = static_cast<int>(k);
  // area-weighted average of grad H over triangles touching each boundary vertex
  std::vector<Point> gh(nb, Point{0.0, 0.0});
  std::vector<double> wsum(nb, 0.0);
  for (std::size_t t = 0; t < M.num_triangles(); ++t) {
    const auto& tri = M.triangles()[t];
    Point g{0.0, 0.0};
    bool touched = false;
    for (int k = 0; k < 3; ++k) touched |= M.is_boundary(tri[k]);
    if (!touched) continue;
    auto sg = M.shape_gradients(static_cast<int>(t));
    for (int k = 0; k < 3; ++k) g = g + f.H[tri[k]] * sg[k];
    double a = M.triangle_area(static_cast<int>(t));
    for (int k = 0; k < 3; ++k) {
      auto it = pos.find(tri[k]);
      if (it == pos.end()) continue;
      gh[it->second] = gh[it->second] + a * g;
      wsum[it->second] += a;
    }
  }
  std::vector<double> integrand(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    Point y = V[B[k]];
    Point prev = V[B[(k + nb - 1) % nb]], next = V[B[(k + 1) % nb]];
    // inward normal of a CCW loop is the left normal of the tangent
    Point tang = next - prev;
    Point n_in = (1.0 / norm(tang)) * Point{-tang.y, tang.x};
    Point d = y - f.pole;
    Point gphi = (-1.0 / (2.0 * kPi * dot(d, d))) * d;
    Point g = gphi - (1.0 / wsum[k]) * gh[k];
    double dn = std::max(dot(g, n_in), 0.0);
    double denom = std::pow(norm(y), p.beta) * dn;
    integrand[k] = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
  }
  double s = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    double len = norm(V[B[(k + 1) % nb]] - V[B[k]]);
    s += 0.5 * len * (integrand[k] + integrand[(k + 1) % nb]);
  }
  BoundaryBound r;
  r.lhs = std::pow(M.area(), 1.0 - p.beta / 2.0);
  r.rhs = s / (4.0 * std::pow(kPi, 1.0 + p.beta / 2.0));
  return r;
}

}  // namespace mtx
