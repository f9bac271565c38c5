#include "mtx/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "delaunay.hpp"
#include "mtx/params.hpp"

namespace mtx {

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

double distance_to_segment(Point p, Point a, Point b) {
  Point d = b - a;
  double l2 = dot(d, d);
  double t = l2 > 0.0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * d));
}

double distance_to_polygon(Point p, const Polygon& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    d = std::min(d, distance_to_segment(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return d;
}

int point_in_polygon(Point p, const Polygon& poly, double tol) {
  double scale = 0.0;
  for (const auto& q : poly) scale = std::max(scale, norm(q - poly[0]));
  if (distance_to_polygon(p, poly) <= tol * std::max(scale, 1.0)) return 0;
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside ? 1 : -1;
}

const char* to_string(OriginLocation loc) {
  switch (loc) {
    case OriginLocation::interior: return "interior";
    case OriginLocation::boundary: return "boundary";
    case OriginLocation::exterior: return "exterior";
  }
  return "unknown";
}

DomainMesh::DomainMesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
                       std::vector<int> boundary)
    : v_(std::move(vertices)), t_(std::move(triangles)), b_(std::move(boundary)) {
  const int nv = static_cast<int>(v_.size());
  if (nv < 3 || t_.empty()) throw std::invalid_argument("mesh: empty");
  for (const auto& p : v_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("mesh: non-finite vertex");
  }
  tri_area_.resize(t_.size());
  lumped_.assign(v_.size(), 0.0);
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(3 * t_.size());
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  for (std::size_t t = 0; t < t_.size(); ++t) {
    const auto& tri = t_[t];
    for (int k : tri) {
      if (k < 0 || k >= nv) throw std::invalid_argument("mesh: triangle index out of range");
    }
    double a = 0.5 * cross(v_[tri[1]] - v_[tri[0]], v_[tri[2]] - v_[tri[0]]);
    if (!(a > 0.0)) {
      throw std::invalid_argument("mesh: triangle " + std::to_string(t) + " is not positively oriented");
    }
    tri_area_[t] = a;
    area_ += a;
    for (int k = 0; k < 3; ++k) {
      lumped_[tri[k]] += a / 3.0;
      ++edge_count[key(tri[k], tri[(k + 1) % 3])];
    }
  }
  on_b_.assign(v_.size(), 0);
  std::size_t nb_edges = 0;
  for (const auto& [k, c] : edge_count) {
    if (c == 1) {
      ++nb_edges;
      on_b_[k >> 32] = 1;
      on_b_[k & 0xffffffffu] = 1;
    } else if (c != 2) {
      throw std::invalid_argument("mesh: edge shared by more than two triangles");
    }
  }
  if (b_.size() != nb_edges) {
    throw std::invalid_argument("mesh: boundary list does not match the boundary edges of the triangulation");
  }
  for (std::size_t i = 0; i < b_.size(); ++i) {
    int a = b_[i], b = b_[(i + 1) % b_.size()];
    if (a < 0 || a >= nv) throw std::invalid_argument("mesh: boundary index out of range");
    auto it = edge_count.find(key(a, b));
    if (it == edge_count.end() || it->second != 1) {
      throw std::invalid_argument("mesh: boundary list is not an ordered loop of boundary edges");
    }
  }
  Polygon poly = boundary_polygon();
  if (polygon_area(poly) < 0.0) throw std::invalid_argument("mesh: boundary loop must be counter-clockwise");
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.size(); ++j) diam_ = std::max(diam_, norm(poly[i] - poly[j]));
  }
  int loc = point_in_polygon({0.0, 0.0}, poly, 1e-12);
  origin_ = loc > 0 ? OriginLocation::interior : (loc == 0 ? OriginLocation::boundary : OriginLocation::exterior);
}

Polygon DomainMesh::boundary_polygon() const {
  Polygon p;
  p.reserve(b_.size());
  for (int i : b_) p.push_back(v_[i]);
  return p;
}

std::array<Point, 3> DomainMesh::shape_gradients(int t) const {
  const auto& tri = t_[t];
  Point p0 = v_[tri[0]], p1 = v_[tri[1]], p2 = v_[tri[2]];
  double two_a = 2.0 * tri_area_[t];
  // grad lambda_i = rot90(opposite edge) / (2A)
  auto g = [&](Point a, Point b) { return Point{(a.y - b.y) / two_a, (b.x - a.x) / two_a}; };
  return {g(p1, p2), g(p2, p0), g(p0, p1)};
}

int DomainMesh::locate(Point p, std::array<double, 3>* bary) const {
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  std::array<double, 3> best_b{};
  for (std::size_t t = 0; t < t_.size(); ++t) {
    const auto& tri = t_[t];
    Point a = v_[tri[0]], b = v_[tri[1]], c = v_[tri[2]];
    double d = cross(b - a, c - a);
    double l1 = cross(c - p, a - p) / d;
    double l2 = cross(a - p, b - p) / d;
    double l0 = 1.0 - l1 - l2;
    double m = std::min({l0, l1, l2});
    if (m > best_min) {
      best_min = m;
      best = static_cast<int>(t);
      best_b = {l0, l1, l2};
    }
    if (m >= 0.0) break;
  }
  if (best_min < -1e-9) return -1;
  if (bary) *bary = best_b;
  return best;
}

DomainMesh DomainMesh::translated(Point d) const {
  std::vector<Point> v(v_);
  for (auto& p : v) p = p + d;
  return DomainMesh(std::move(v), t_, b_);
}

Polygon disk_polygon(double radius, Point center, int n) {
  Polygon p(n);
  for (int k = 0; k < n; ++k) {
    double th = 2.0 * kPi * k / n;
    p[k] = {center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
  }
  return p;
}

Polygon rectangle_polygon(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

Polygon square_polygon(double half) { return rectangle_polygon(-half, -half, half, half); }

Polygon l_hexagon_polygon() {
  return {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {-1.0, 1.0}};
}

namespace {

void orient_or_throw(std::vector<Point>& v, std::vector<std::array<int, 3>>& tris) {
  for (auto& t : tris) {
    double a = cross(v[t[1]] - v[t[0]], v[t[2]] - v[t[0]]);
    if (a < 0.0) std::swap(t[1], t[2]);
    if (a == 0.0) throw std::runtime_error("mesh generator produced a degenerate triangle");
  }
}

void check_star_shaped(const Polygon& poly, Point c) {
  if (poly.size() < 3) throw std::invalid_argument("polygon needs at least three vertices");
  if (polygon_area(poly) <= 0.0) throw std::invalid_argument("polygon must be counter-clockwise");
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (!(cross(poly[i] - c, poly[(i + 1) % poly.size()] - c) > 0.0)) {
      throw std::invalid_argument("polygon is not star-shaped about the mesh center");
    }
  }
}

}  // namespace

DomainMesh make_fan_mesh(const Polygon& poly, Point c, int L) {
  check_star_shaped(poly, c);
  if (L < 1) throw std::invalid_argument("fan mesh: levels must be positive");
  const int n = static_cast<int>(poly.size());
  std::vector<Point> v;
  v.push_back(c);
  // ray[k][i]: point i/L along the ray to vertex k, i >= 1
  std::vector<std::vector<int>> ray(n, std::vector<int>(L + 1, 0));
  for (int k = 0; k < n; ++k) {
    for (int i = 1; i <= L; ++i) {
      ray[k][i] = static_cast<int>(v.size());
      v.push_back(c + (static_cast<double>(i) / L) * (poly[k] - c));
    }
  }
  std::vector<std::array<int, 3>> tris;
  std::vector<int> boundary;
  for (int k = 0; k < n; ++k) {
    int k1 = (k + 1) % n;
    Point a = poly[k] - c, b = poly[k1] - c;
    // lattice index (i, j), 0 <= j <= i
    std::vector<std::vector<int>> q(L + 1);
    for (int i = 0; i <= L; ++i) {
      q[i].resize(i + 1);
      for (int j = 0; j <= i; ++j) {
        if (i == 0) {
          q[i][j] = 0;
        } else if (j == 0) {
          q[i][j] = ray[k][i];
        } else if (j == i) {
          q[i][j] = ray[k1][i];
        } else {
          q[i][j] = static_cast<int>(v.size());
          v.push_back(c + (static_cast<double>(i - j) / L) * a + (static_cast<double>(j) / L) * b);
        }
      }
    }
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j <= i; ++j) {
        tris.push_back({q[i][j], q[i + 1][j], q[i + 1][j + 1]});
        if (j < i) tris.push_back({q[i][j], q[i + 1][j + 1], q[i][j + 1]});
      }
    }
    for (int j = 0; j < L; ++j) boundary.push_back(q[L][j]);
  }
  orient_or_throw(v, tris);
  return DomainMesh(std::move(v), std::move(tris), std::move(boundary));
}

namespace {

// Bucketed polygon edges for fast inside and near-boundary queries.
class PolygonIndex {
 public:
  PolygonIndex(const Polygon& poly, double cell) : poly_(poly) {
    x0_ = y0_ = std::numeric_limits<double>::infinity();
    double x1 = -x0_, y1 = -y0_;
    for (const auto& p : poly) {
      x0_ = std::min(x0_, p.x);
      y0_ = std::min(y0_, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    cell_ = cell;
    nx_ = std::max(1, static_cast<int>(std::ceil((x1 - x0_) / cell)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil((y1 - y0_) / cell)) + 1);
    grid_.resize(static_cast<std::size_t>(nx_) * ny_);
    rows_.resize(ny_);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      Point a = poly[i], b = poly[(i + 1) % poly.size()];
      int ia = cx(std::min(a.x, b.x)), ib = cx(std::max(a.x, b.x));
      int ja = cy(std::min(a.y, b.y)), jb = cy(std::max(a.y, b.y));
      for (int j = ja; j <= jb; ++j) {
        rows_[j].push_back(i);
        for (int k = ia; k <= ib; ++k) grid_[static_cast<std::size_t>(j) * nx_ + k].push_back(i);
      }
    }
  }

  bool inside(Point p) const {
    if (p.y < y0_ || p.x < x0_) return false;
    int j = cy(p.y);
    if (j >= ny_) return false;
    bool in = false;
    for (std::size_t i : rows_[j]) {
      Point a = poly_[i], b = poly_[(i + 1) % poly_.size()];
      if ((a.y > p.y) != (b.y > p.y)) {
        double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < x) in = !in;
      }
    }
    return in;
  }

  // True when some edge lies closer than r (r <= cell).
  bool near(Point p, double r) const {
    int i0 = cx(p.x - r), i1 = cx(p.x + r), j0 = cy(p.y - r), j1 = cy(p.y + r);
    for (int j = j0; j <= j1; ++j) {
      for (int k = i0; k <= i1; ++k) {
        for (std::size_t e : grid_[static_cast<std::size_t>(j) * nx_ + k]) {
          if (distance_to_segment(p, poly_[e], poly_[(e + 1) % poly_.size()]) < r) return true;
        }
      }
    }
    return false;
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>((x - x0_) / cell_), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>((y - y0_) / cell_), 0, ny_ - 1); }

  const Polygon& poly_;
  double x0_, y0_, cell_;
  int nx_, ny_;
  std::vector<std::vector<std::size_t>> grid_;
  std::vector<std::vector<std::size_t>> rows_;
};

// Boundary node placement: spacing min(h, kappa |p - c|), corners kept.
std::vector<Point> place_boundary_nodes(const Polygon& poly, Point c, const GradedMeshOptions& o,
                                        double kappa) {
  const std::size_t n = poly.size();
  double cos_corner = std::cos(o.corner_angle * kPi / 180.0);
  std::vector<std::size_t> corners;
  for (std::size_t i = 0; i < n; ++i) {
    Point a = poly[i] - poly[(i + n - 1) % n];
    Point b = poly[(i + 1) % n] - poly[i];
    if (dot(a, b) < cos_corner * norm(a) * norm(b)) corners.push_back(i);
  }
  if (corners.empty()) corners.push_back(0);
  // Fine sampling of each chain with cumulative node density.
  struct Chain {
    std::vector<Point> pts;
    std::vector<double> cum;
  };
  std::vector<Chain> chains(corners.size());
  double total = 0.0;
  for (std::size_t ci = 0; ci < corners.size(); ++ci) {
    std::size_t start = corners[ci];
    std::size_t stop = corners[(ci + 1) % corners.size()];
    if (corners.size() == 1) stop = start + n;
    else if (stop <= start) stop += n;
    Chain& ch = chains[ci];
    ch.pts.push_back(poly[start % n]);
    ch.cum.push_back(0.0);
    for (std::size_t e = start; e < stop; ++e) {
      Point a = poly[e % n], b = poly[(e + 1) % n];
      double len = norm(b - a);
      double dmin = distance_to_segment(c, a, b);
      double step = 0.1 * std::min(o.h, kappa * dmin);
      int pieces = std::max(1, static_cast<int>(std::ceil(len / step)));
      for (int k = 1; k <= pieces; ++k) {
        Point p = a + (static_cast<double>(k) / pieces) * (b - a);
        Point mid = 0.5 * (p + ch.pts.back());
        double ds = std::min(o.h, kappa * norm(mid - c));
        ch.cum.push_back(ch.cum.back() + norm(p - ch.pts.back()) / ds);
        ch.pts.push_back(p);
      }
    }
    total += ch.cum.back();
  }
  int m = std::max(static_cast<int>(std::ceil(total)), static_cast<int>(corners.size()) + 3);
  // Largest-remainder split of m nodes over the chains.
  std::vector<int> cnt(chains.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    double share = m * chains[ci].cum.back() / total;
    cnt[ci] = std::max(1, static_cast<int>(std::floor(share)));
    used += cnt[ci];
    rem.push_back({share - std::floor(share), ci});
  }
  std::sort(rem.begin(), rem.end(), [](auto& x, auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
  for (std::size_t k = 0; used < m; k = (k + 1) % rem.size(), ++used) ++cnt[rem[k].second];
  while (used > m) {
    auto it = std::max_element(cnt.begin(), cnt.end());
    --*it;
    --used;
  }
  std::vector<Point> out;
  out.reserve(m);
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    const Chain& ch = chains[ci];
    for (int k = 0; k < cnt[ci]; ++k) {
      double target = ch.cum.back() * k / cnt[ci];
      auto it = std::lower_bound(ch.cum.begin(), ch.cum.end(), target);
      std::size_t i = static_cast<std::size_t>(it - ch.cum.begin());
      if (i == 0) {
        out.push_back(ch.pts[0]);
        continue;
      }
      double lam = (target - ch.cum[i - 1]) / (ch.cum[i] - ch.cum[i - 1]);
      out.push_back(ch.pts[i - 1] + lam * (ch.pts[i] - ch.pts[i - 1]));
    }
  }
  return out;
}

// Concentric circles about c, radii r0 > r1 > ..., joined to the ring `outer`
// (angles phi0 + 2 pi k / m); closes with a fan at c.
void append_disk_rings(std::vector<Point>& v, std::vector<std::array<int, 3>>& tris, Point c,
                       std::vector<int> outer, double r0, double phi0, double mid, double inner,
                       const GradedMeshOptions& o) {
  int m = static_cast<int>(outer.size());
  double r = r0;
  while (true) {
    int target = r >= mid ? o.ring_mid : o.ring_deep;
    bool halve = m / 2 >= target && m % 2 == 0 && r < mid;
    int mn = halve ? m / 2 : m;
    double rn = r * (1.0 - 2.0 * kPi / mn);
    if (rn < inner) break;
    std::vector<int> in(mn);
    for (int k = 0; k < mn; ++k) {
      double th = phi0 + 2.0 * kPi * k / mn;
      in[k] = static_cast<int>(v.size());
      v.push_back({c.x + rn * std::cos(th), c.y + rn * std::sin(th)});
    }
    if (halve) {
      for (int k = 0; k < mn; ++k) {
        int a0 = outer[2 * k], a1 = outer[2 * k + 1], a2 = outer[(2 * k + 2) % m];
        int b0 = in[k], b1 = in[(k + 1) % mn];
        tris.push_back({a0, a1, b0});
        tris.push_back({a1, a2, b1});
        tris.push_back({a1, b1, b0});
      }
    } else {
      for (int k = 0; k < m; ++k) {
        int a0 = outer[k], a1 = outer[(k + 1) % m], b0 = in[k], b1 = in[(k + 1) % m];
        tris.push_back({a0, a1, b1});
        tris.push_back({a0, b1, b0});
      }
    }
    outer = std::move(in);
    m = mn;
    r = rn;
  }
  int ci = static_cast<int>(v.size());
  v.push_back(c);
  for (int k = 0; k < m; ++k) tris.push_back({ci, outer[k], outer[(k + 1) % m]});
}

DomainMesh pole_mesh_impl(const Polygon& poly, Point x, const GradedMeshOptions& o,
                          const std::function<Point(Point)>& project) {
  if (poly.size() < 3 || polygon_area(poly) <= 0.0) throw std::invalid_argument("pole mesh: polygon must be counter-clockwise");
  if (point_in_polygon(x, poly) <= 0) throw std::invalid_argument("pole mesh: pole must lie strictly inside the polygon");
  const double kappa = 2.0 * kPi / o.ring_mid;
  const double d = distance_to_polygon(x, poly);
  double rc = 0.5 * d;
  auto spacing = [&](Point p) { return std::min(o.h, kappa * norm(p - x)); };
  rc = std::min(rc, o.h / kappa);

  std::vector<Point> pts = place_boundary_nodes(poly, x, o, kappa);
  if (project) {
    for (auto& p : pts) p = project(p);
  }
  const int n_boundary = static_cast<int>(pts.size());
  double reach = 0.0;
  for (const auto& q : poly) reach = std::max(reach, norm(q - x));
  PolygonIndex index(poly, o.h);
  // Interior points on circles about x with spacing min(h, kappa r).
  double r = rc;
  int k = 0;
  while (true) {
    double l = std::min(o.h, kappa * r);
    r += 0.866 * l;
    if (r > reach) break;
    ++k;
    double lr = std::min(o.h, kappa * r);
    int n = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * r / lr)));
    double off = 2.399963229728653 * k;
    for (int i = 0; i < n; ++i) {
      double th = off + 2.0 * kPi * i / n;
      Point p{x.x + r * std::cos(th), x.y + r * std::sin(th)};
      if (!index.inside(p) || index.near(p, 0.7 * spacing(p))) continue;
      pts.push_back(p);
    }
  }
  const int m_c = o.ring_mid;
  std::vector<int> circle(m_c);
  for (int i = 0; i < m_c; ++i) {
    double th = 2.0 * kPi * i / m_c;
    circle[i] = static_cast<int>(pts.size());
    pts.push_back({x.x + rc * std::cos(th), x.y + rc * std::sin(th)});
  }
  const int center = static_cast<int>(pts.size());
  pts.push_back(x);

  std::vector<std::array<int, 3>> all = detail::delaunay(pts);
  std::vector<std::array<int, 3>> tris;
  for (const auto& t : all) {
    if (t[0] == center || t[1] == center || t[2] == center) continue;
    Point g = (1.0 / 3.0) * (pts[t[0]] + pts[t[1]] + pts[t[2]]);
    if (norm(g - x) < rc) throw std::runtime_error("pole mesh: inner circle not recovered by the triangulation");
    if (!index.inside(g)) continue;
    tris.push_back(t);
  }
  pts.pop_back();
  double inner = std::max(o.inner_radius * d, norm(x) > 0.0 ? 1e-12 * norm(x) : 0.0);
  append_disk_rings(pts, tris, x, circle, rc, 0.0, o.mid_radius * d, inner, o);
  for (const auto& t : tris) {
    if (!(cross(pts[t[1]] - pts[t[0]], pts[t[2]] - pts[t[0]]) > 0.0)) {
      throw std::runtime_error("pole mesh: inverted triangle");
    }
  }
  std::vector<int> boundary(n_boundary);
  std::iota(boundary.begin(), boundary.end(), 0);
  return DomainMesh(std::move(pts), std::move(tris), std::move(boundary));
}

}  // namespace

DomainMesh make_pole_mesh(const Polygon& poly, Point pole, const GradedMeshOptions& opts) {
  return pole_mesh_impl(poly, pole, opts, {});
}

DomainMesh make_disk_mesh(double radius, Point dc, Point pole, const GradedMeshOptions& opts) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk mesh: radius must be positive");
  if (norm(pole - dc) >= radius) throw std::invalid_argument("disk mesh: pole outside the disk");
  Polygon poly = disk_polygon(radius, dc, 4096);
  GradedMeshOptions o = opts;
  o.corner_angle = 90.0;
  auto proj = [dc, radius](Point p) {
    Point d = p - dc;
    return dc + (radius / norm(d)) * d;
  };
  return pole_mesh_impl(poly, pole, o, proj);
}

}  // namespace mtx
